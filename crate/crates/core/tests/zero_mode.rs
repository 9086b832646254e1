use couette::zero_mode::*;
use couette::{PhysParams, YGrid};

const WIDTH: f64 = 4.0;

fn gaussian(y: f64, center: f64, width: f64) -> f64 {
    (-(y - center).powi(2) / (2.0 * width * width)).exp()
}

/// Half width that keeps the cone plus eight packet widths inside.
fn half_width(params: PhysParams, t: f64) -> f64 {
    params.sound_speed() * t + 8.0 * WIDTH
}

#[test]
fn gaussian_matches_dalembert_on_fine_grid() {
    for m in [0.5, 1.0, 2.0] {
        let p = PhysParams::new(1.4, m).unwrap();
        let grid = YGrid::new(half_width(p, 2.0), 4096).unwrap();
        let s0 = ZeroModeState::from_fn(grid, |y| {
            let g = gaussian(y, 0.0, WIDTH);
            [0.6 * g, 0.0, 0.2 * g, 0.4 * g]
        });
        let dt = 0.5 * m * grid.spacing();
        let s = evolve_zero_mode(&s0, p, 2.0, dt).unwrap();
        let err = dalembert_reference(&s0, p, 2.0).unwrap().max_error(&s.sum_rho_theta());
        assert!(err < 1e-6, "M = {m}: {err}");
        let (e0, e1) = (wave_energy(&s0, p), wave_energy(&s, p));
        assert!(((e1 - e0) / e0).abs() < 1e-6, "M = {m}: energy {e0} → {e1}");
    }
}

#[test]
fn moving_data_with_initial_velocity() {
    let p = PhysParams::new(2.0, 1.0).unwrap();
    let grid = YGrid::new(half_width(p, 2.0), 4096).unwrap();
    let s0 = ZeroModeState::from_fn(grid, |y| {
        [gaussian(y, 1.0, WIDTH), 0.3 * gaussian(y, -2.0, WIDTH), 0.0, 0.0]
    });
    let s = evolve_zero_mode(&s0, p, 2.0, 0.5 * grid.spacing()).unwrap();
    let err = dalembert_reference(&s0, p, 2.0).unwrap().max_error(&s.sum_rho_theta());
    assert!(err < 1e-6, "{err}");
}

#[test]
fn alpha_obeys_its_own_wave_equation() {
    let p = PhysParams::new(1.4, 1.0).unwrap();
    let grid = YGrid::new(half_width(p, 2.0), 4096).unwrap();
    let s0 = ZeroModeState::from_fn(grid, |y| {
        [gaussian(y, 0.0, WIDTH), 0.5 * gaussian(y, 3.0, WIDTH), 0.0, 0.0]
    });
    let s = evolve_zero_mode(&s0, p, 2.0, 0.5 * grid.spacing()).unwrap();
    // ∂_t α₀ at t = 0 is −(1/(γM²)) ∂_yy(ρ₀ + θ₀), taken analytically.
    let c = -1.0 / (p.gamma * p.mach * p.mach);
    let w2 = WIDTH * WIDTH;
    let g: Vec<f64> = grid
        .points()
        .into_iter()
        .map(|y| c * (y * y / (w2 * w2) - 1.0 / w2) * gaussian(y, 0.0, WIDTH))
        .collect();
    let prof = dalembert(&s0.alpha0, &g, grid, p.sound_speed(), 2.0).unwrap();
    let err = prof.max_error(&s.alpha0);
    assert!(err < 1e-6, "{err}");
}

#[test]
fn recovered_fields_match_evolved_ones() {
    let p = PhysParams::new(1.4, 0.8).unwrap();
    let grid = YGrid::new(40.0, 1601).unwrap();
    let s0 = ZeroModeState::from_fn(grid, |y| {
        let g = gaussian(y, 0.0, 3.0);
        [g, -0.2 * g, 0.5 * g, 0.1 * g]
    });
    let traj = evolve_zero_mode_sampled(&s0, p, 5.0, 0.5 * 0.8 * grid.spacing(), 0.5).unwrap();
    assert!(traj.len() >= 11);
    for (_, s) in &traj {
        let (om, th) = recover_zero_fields(&s.rho0, &s0, p).unwrap();
        for j in 0..grid.len() {
            assert!((om[j] - s.omega0[j]).abs() < 1e-8);
            assert!((th[j] - s.theta0[j]).abs() < 1e-8);
        }
    }
}

#[test]
fn zero_data_persists_exactly() {
    let p = PhysParams::new(1.4, 0.5).unwrap();
    let grid = YGrid::new(10.0, 401).unwrap();
    let s0 = ZeroModeState::zeros(grid);
    let traj = evolve_zero_mode_sampled(&s0, p, 3.0, 0.25 * grid.spacing(), 1.0).unwrap();
    for (_, s) in traj {
        assert!(s.rho0.iter().chain(&s.alpha0).chain(&s.omega0).chain(&s.theta0).all(|v| *v == 0.0));
    }
}

#[test]
fn error_is_second_order_in_space() {
    let p = PhysParams::new(1.4, 1.0).unwrap();
    let err = |n: usize| {
        let grid = YGrid::new(12.0, n).unwrap();
        let s0 = ZeroModeState::from_fn(grid, |y| [gaussian(y, 0.0, 1.0), 0.0, 0.0, 0.0]);
        let s = evolve_zero_mode(&s0, p, 2.0, 0.5 * grid.spacing()).unwrap();
        dalembert_reference(&s0, p, 2.0).unwrap().max_error(&s.sum_rho_theta())
    };
    let (e1, e2) = (err(401), err(801));
    let ratio = e1 / e2;
    assert!((3.5..4.5).contains(&ratio), "{e1} {e2} {ratio}");
}
