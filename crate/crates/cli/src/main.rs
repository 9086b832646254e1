use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use couette::analysis::oracle::{oracle_compare, OracleSetup};
use couette::analysis::run::{run_config, to_json, write_atomic};
use couette::analysis::series::NormSeries;
use couette::analysis::sweep::{run_sweep, sweep_csv};
use couette::analysis::{duhamel_bound_check, fit_power_law, reference_constant, RunConfig};
use couette::zero_mode::{dalembert_reference, evolve_zero_mode, wave_energy, ZeroModeState};
use couette::{ModeKey, PhysParams, YGrid};

/// Limits applied by the `zero-mode` and `oracle-compare` suites.
const ZERO_MODE_TOL: f64 = 1e-6;
const ORACLE_TOL: f64 = 1e-3;

#[derive(Parser)]
#[command(name = "couette", version, about = "Linearized compressible Couette flow: simulation and checks")]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the spectral pipeline and write norms.csv and report.json.
    Simulate {
        /// Overrides `out_dir` from the config.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Cross the [sweep] lists of γ and M, with random data if requested.
    Sweep {
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Fit power laws to an existing norms.csv.
    Rates {
        #[arg(long)]
        csv: PathBuf,
        /// Fit window; defaults to the config's window, else [0.1 t_max, t_max].
        #[arg(long, num_args = 2, value_names = ["T_LO", "T_HI"])]
        window: Option<Vec<f64>>,
    },
    /// Zero-mode wave evolution against the d'Alembert formula.
    ZeroMode(ZeroModeArgs),
    /// Spectral solution against the finite-difference oracle.
    OracleCompare {
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 1)]
        k: i32,
        /// Number of discretization levels, each refined 2×.
        #[arg(long, default_value_t = 2)]
        levels: usize,
    },
    /// Forcing-integral bound at the given wavenumbers, η values and γ values.
    DuhamelBound {
        #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3])]
        k: Vec<i32>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 1.0, 10.0])]
        eta: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [1.4, 2.0])]
        gamma: Vec<f64>,
    },
}

#[derive(Args)]
struct ZeroModeArgs {
    /// Defaults to the config's γ, else 1.4.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
    mach: Vec<f64>,
    #[arg(long, default_value_t = 2.0)]
    t: f64,
    #[arg(long, default_value_t = 4096)]
    n: usize,
    /// Width of the Gaussian data.
    #[arg(long, default_value_t = 4.0)]
    width: f64,
}

fn load(config: &Option<PathBuf>) -> Result<RunConfig> {
    let path = config.as_ref().context("this command needs --config <path>")?;
    RunConfig::load(path).with_context(|| format!("loading {}", path.display()))
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn simulate(cfg: &mut RunConfig, out_dir: Option<PathBuf>) -> Result<bool> {
    if let Some(d) = out_dir {
        cfg.out_dir = d;
    }
    let (out, art) = run_config(cfg)?;
    let r = &out.report;
    for c in r.invariants.iter().chain(&r.rates) {
        println!("{} {:<24} {:>12.4e}  {}", pass_fail(c.pass), c.name, c.value, c.limit);
    }
    let th = &r.theorem_constants;
    println!(
        "theorem constants: x {:.4e}  y {:.4e}  growth {:.4e}",
        th.incompressible_x.constant, th.incompressible_y.constant, th.compressible_growth.constant
    );
    println!("duhamel margin: {:.4e}", r.duhamel_margin);
    println!("wrote {} and {}", art.norms_csv.display(), art.report_json.display());
    Ok(r.invariants_pass())
}

fn sweep(cfg: &RunConfig, out_dir: Option<PathBuf>) -> Result<bool> {
    let dir = out_dir.unwrap_or_else(|| cfg.out_dir.clone());
    let points = run_sweep(cfg)?;
    write_atomic(&dir.join("sweep.csv"), sweep_csv(&points).as_bytes())?;
    write_atomic(&dir.join("sweep.json"), to_json(&points)?.as_bytes())?;
    print!("{}", sweep_csv(&points));
    Ok(points.iter().all(|p| p.invariants_pass))
}

fn rates(csv: &Path, window: Option<Vec<f64>>, config: &Option<PathBuf>) -> Result<bool> {
    let text = std::fs::read_to_string(csv).with_context(|| format!("reading {}", csv.display()))?;
    let series = NormSeries::from_csv(&text)?;
    let window = match (window, config) {
        (Some(w), _) => [w[0], w[1]],
        (None, Some(_)) => load(config)?.fit_window,
        (None, None) => {
            let t_max = *series.times.last().context("empty series")?;
            [0.1 * t_max, t_max]
        }
    };
    let mut ok = true;
    for (name, values) in [
        ("pvx", series.pvx.clone()),
        ("pvy", series.pvy.clone()),
        ("compressible", series.compressible()),
    ] {
        match fit_power_law(&series.times, &values, window) {
            Ok(f) => println!(
                "{name:<14} exponent {:>9.4}  residual {:.3e}  window [{}, {}]  samples {}",
                f.exponent, f.residual, f.window[0], f.window[1], f.samples
            ),
            Err(e) => {
                ok = false;
                println!("{name:<14} no fit: {e}");
            }
        }
    }
    Ok(ok)
}

fn zero_mode(args: &ZeroModeArgs, config: &Option<PathBuf>) -> Result<bool> {
    let gamma = match (args.gamma, config) {
        (Some(g), _) => g,
        (None, Some(_)) => load(config)?.params.gamma,
        (None, None) => 1.4,
    };
    let mut ok = true;
    for &m in &args.mach {
        let p = PhysParams::new(gamma, m)?;
        let grid = YGrid::new(p.sound_speed() * args.t + 8.0 * args.width, args.n)?;
        let w = args.width;
        let s0 = ZeroModeState::from_fn(grid, |y| {
            let g = (-y * y / (2.0 * w * w)).exp();
            [0.6 * g, 0.0, 0.2 * g, 0.4 * g]
        });
        let s = evolve_zero_mode(&s0, p, args.t, 0.5 * m * grid.spacing())?;
        let err = dalembert_reference(&s0, p, args.t)?.max_error(&s.sum_rho_theta());
        let (e0, e1) = (wave_energy(&s0, p), wave_energy(&s, p));
        let drift = ((e1 - e0) / e0).abs();
        let pass = err < ZERO_MODE_TOL && drift < ZERO_MODE_TOL;
        ok &= pass;
        println!("{} M = {m}: max error {err:.3e}, energy drift {drift:.3e}", pass_fail(pass));
    }
    Ok(ok)
}

fn oracle(cfg: &RunConfig, t: f64, k: i32, levels: usize) -> Result<bool> {
    if !cfg.k_set.contains(&k) {
        bail!("k = {k} is not in the config's k_set {:?}", cfg.k_set);
    }
    let setup = OracleSetup::for_data(&cfg.initial, cfg.params, k, t)?;
    let report = oracle_compare(&cfg.initial, cfg.params, setup, levels)?;
    let mut ok = report.monotone || report.levels.len() < 2;
    for l in &report.levels {
        let pass = l.discrepancy.iter().all(|d| *d < ORACLE_TOL);
        ok &= pass;
        let [r, a, w, th] = l.discrepancy;
        println!(
            "{} n_y {:>6} n_eta {:>5}: rho {r:.3e} alpha {a:.3e} omega {w:.3e} theta {th:.3e}",
            pass_fail(pass),
            l.n_y,
            l.n_eta
        );
    }
    if report.levels.len() > 1 {
        println!("{} monotone under refinement", pass_fail(report.monotone));
    }
    Ok(ok)
}

fn duhamel(ks: &[i32], etas: &[f64], gammas: &[f64]) -> Result<bool> {
    println!("reference constant {:.10}", reference_constant());
    let mut ok = true;
    for &g in gammas {
        let p = PhysParams::new(g, 1.0)?;
        for &k in ks {
            for &eta in etas {
                let d = duhamel_bound_check(ModeKey::new(k, eta)?, p, 1e-10)?;
                ok &= d.holds;
                println!(
                    "{} γ = {g} k = {k} η = {eta}: value {:.8} bound {:.5}",
                    pass_fail(d.holds),
                    d.value,
                    d.bound
                );
            }
        }
    }
    Ok(ok)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate { out_dir } => simulate(&mut load(&cli.config)?, out_dir),
        Command::Sweep { out_dir } => sweep(&load(&cli.config)?, out_dir),
        Command::Rates { csv, window } => rates(&csv, window, &cli.config),
        Command::ZeroMode(args) => zero_mode(&args, &cli.config),
        Command::OracleCompare { t, k, levels } => oracle(&load(&cli.config)?, t, k, levels),
        Command::DuhamelBound { k, eta, gamma } => duhamel(&k, &eta, &gamma),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
