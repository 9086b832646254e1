use couette::analysis::oracle::{oracle_compare, oracle_level, OracleSetup};
use couette::fd_oracle::{evolve_fd, max_stable_dt, mode_l2_norm, FdState};
use couette::spectral::{aniso_norm, GaussianProfile, InitialDataSpec, PacketSpec};
use couette::{EtaGrid, PhysParams, SpectralField, YGrid};
use num_complex::Complex64;

fn gaussian(center: f64, width: f64, amplitude: f64) -> GaussianProfile {
    GaussianProfile {
        center,
        width,
        amplitude,
    }
}

fn data() -> InitialDataSpec {
    InitialDataSpec {
        rho: PacketSpec::single(1, gaussian(0.0, 1.0, 1.0)),
        alpha: PacketSpec::single(1, gaussian(0.5, 1.0, 0.3)),
        omega: PacketSpec::single(1, gaussian(-0.5, 1.0, 0.5)),
        theta: PacketSpec::single(1, gaussian(0.0, 1.0, 0.2)),
    }
}

#[test]
fn plancherel_bridge_at_t0() {
    let spec = data();
    let grid = YGrid::new(20.0, 4001).unwrap();
    let fd = FdState::from_initial(&spec, 1, grid).unwrap();
    let eg = EtaGrid::symmetric(10.0, 401).unwrap();
    for ((_, packet), profile) in spec.fields().into_iter().zip(fd.profiles()) {
        let row = SpectralField::from_fn(eg, &[1], |k, eta| packet.spectrum(k, eta)).unwrap();
        let a = mode_l2_norm(profile, grid);
        let b = aniso_norm(&row, 0.0, 0.0);
        assert!((a - b).abs() < 1e-6 * b, "{a} vs {b}");
    }
}

#[test]
fn transported_combinations_keep_their_modulus() {
    let params = PhysParams::new(1.4, 1.0).unwrap();
    let grid = YGrid::new(40.0, 1601).unwrap();
    let s0 = FdState::from_initial(&data(), 1, grid).unwrap();
    let dt = max_stable_dt(1, grid, params);
    let traj = evolve_fd(&s0, params, 5.0, dt, 40).unwrap();
    let g = params.gamma;
    let beta = |s: &FdState, j: usize| s.rho[j] + s.omega[j];
    let gam = |s: &FdState, j: usize| s.theta[j] + s.omega[j] * (g - 1.0);
    let scale = (0..grid.len()).map(|j| beta(&s0, j).norm().max(gam(&s0, j).norm())).fold(0.0, f64::max);
    assert!(traj.len() > 2);
    for (t, s) in &traj {
        for j in 0..grid.len() {
            let d1 = (beta(s, j).norm() - beta(&s0, j).norm()).abs();
            let d2 = (gam(s, j).norm() - gam(&s0, j).norm()).abs();
            assert!(d1.max(d2) < 1e-6 * scale, "t = {t}, y = {}", grid.point(j));
        }
    }
}

#[test]
fn transported_combinations_pick_up_only_the_shear_phase() {
    let params = PhysParams::new(2.0, 0.5).unwrap();
    let grid = YGrid::new(40.0, 1601).unwrap();
    let s0 = FdState::from_initial(&data(), 1, grid).unwrap();
    let dt = max_stable_dt(1, grid, params);
    let (t, s) = evolve_fd(&s0, params, 2.0, dt, usize::MAX).unwrap().pop().unwrap();
    for j in 0..grid.len() {
        let y = grid.point(j);
        let expect = (s0.rho[j] + s0.omega[j]) * Complex64::from_polar(1.0, -t * y);
        assert!((s.rho[j] + s.omega[j] - expect).norm() < 1e-6);
    }
}

#[test]
fn zero_time_discrepancy_is_transform_error_only() {
    let params = PhysParams::new(1.4, 1.0).unwrap();
    let setup = OracleSetup::for_data(&data(), params, 1, 0.0).unwrap();
    let level = oracle_level(&data(), params, &setup).unwrap();
    for d in level.discrepancy {
        assert!(d < 1e-8, "{:?}", level.discrepancy);
    }
}

#[test]
fn spectral_and_fd_agree_at_t1_and_converge() {
    let params = PhysParams::new(1.4, 1.0).unwrap();
    let setup = OracleSetup::for_data(&data(), params, 1, 1.0).unwrap();
    let report = oracle_compare(&data(), params, setup, 2).unwrap();
    for level in &report.levels {
        for d in level.discrepancy {
            assert!(d < 1e-3, "{:?}", level);
        }
    }
    assert!(report.monotone, "{report:?}");
}
