use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"
[params]
gamma = 1.4
mach = 1.0

[grid]
eta_min = -8.0
eta_max = 8.0
n_eta = 33
k_set = [1]

[initial.rho]
amplitude = 1.0

[initial.omega]
amplitude = 0.5
phase = 1.0

[run]
t_end = 30.0
sample_dt = 1.0
convention = "derived"
out_dir = "unused"
seed = 1
"#;

const ZERO: &str = r#"
[params]
gamma = 1.4
mach = 1.0

[grid]
eta_min = -4.0
eta_max = 4.0
n_eta = 17
k_set = [1]

[run]
t_end = 20.0
sample_dt = 1.0
out_dir = "unused"
seed = 1
"#;

fn couette(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_couette")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn simulate_writes_identical_artifacts_twice() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let mut csvs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let o = couette(&["--config", &cfg, "simulate", "--out-dir", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("PASS beta_drift"));
        let report: String = std::fs::read_to_string(out.join("report.json")).unwrap();
        assert!(report.contains("\"theorem_constants\"") && report.contains("\"oracle\""));
        csvs.push(std::fs::read(out.join("norms.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    let text = String::from_utf8(csvs.remove(0)).unwrap();
    assert!(text.starts_with(
        "t,pvx_l2,pvy_l2,qv_l2,rho_l2_scaled,theta_l2_scaled,lyap_ratio_min,lyap_ratio_max,beta_drift,gamma_drift,sigma_drift\n"
    ));
    assert_eq!(text.lines().count(), 32);
}

#[test]
fn zero_data_gives_zero_series_and_success() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "zero.toml", ZERO);
    let out = dir.path().join("zero");
    let o = couette(&["--config", &cfg, "simulate", "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out.join("norms.csv")).unwrap();
    for line in text.lines().skip(1) {
        assert!(line.split(',').skip(1).all(|v| v.parse::<f64>().unwrap() == 0.0), "{line}");
    }
}

#[test]
fn rates_reads_a_written_series() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let out = dir.path().join("r");
    assert!(couette(&["--config", &cfg, "simulate", "--out-dir", out.to_str().unwrap()]).status.success());
    let csv = out.join("norms.csv");
    let o = couette(&["rates", "--csv", csv.to_str().unwrap(), "--window", "5", "30"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("pvx") && s.contains("compressible") && s.contains("window [5, 30]"), "{s}");
}

#[test]
fn duhamel_bound_reports_each_point() {
    let o = couette(&["duhamel-bound", "--k", "1,2", "--eta", "0", "--gamma", "1.4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 2);
    // Past the critical time the integral exceeds the whole-line constant.
    let o = couette(&["duhamel-bound", "--k", "1", "--eta", "10", "--gamma", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn zero_mode_suite_passes() {
    let o = couette(&["zero-mode", "--mach", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS M = 1"));
}

#[test]
fn oracle_compare_runs_one_level() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let o = couette(&["--config", &cfg, "oracle-compare", "--levels", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("PASS n_y"));
}

#[test]
fn sweep_writes_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let text = ZERO.replace("[run]", "[initial.rho]\namplitude = 1.0\nwidth = 2.0\n\n[run]")
        + "\n[sweep]\ngamma = [1.4, 2.0]\nmach = [1.0]\nsamples = 0\n";
    let cfg = write_config(dir.path(), "sweep.toml", &text);
    let out = dir.path().join("s");
    let o = couette(&["--config", &cfg, "sweep", "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(out.join("sweep.json").exists());
}

#[test]
fn bad_input_is_an_error() {
    let o = couette(&["simulate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--config"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", &SMALL.replace("seed = 1", "seed = 1\nbogus = 2"));
    let o = couette(&["--config", &cfg, "simulate"]);
    assert_eq!(o.status.code(), Some(2));

    let o = couette(&["--config", "/nonexistent/cfg.toml", "simulate"]);
    assert_eq!(o.status.code(), Some(2));
}
