use couette::dynamics::{
    duhamel_solve, integrate, propagator, FullModeState, FullSystem, StepPolicy, UnweightedSystem, WeightedSystem,
};
use couette::symbols::{unweight, weight, WeightedState};
use couette::{Convention, Error, ModeKey, PhysParams};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn tight() -> StepPolicy {
    StepPolicy {
        tol: 1e-11,
        ..StepPolicy::default()
    }
}

fn rel(a: Complex64, b: Complex64, scale: f64) -> f64 {
    (a - b).norm() / scale
}

#[test]
fn zero_data_gives_zero_trajectory() {
    let key = ModeKey::new(1, 0.3).unwrap();
    let params = PhysParams::new(1.4, 1.0).unwrap();
    let sys = FullSystem {
        key,
        params,
        convention: Convention::Derived,
    };
    let traj = integrate(&sys, [Complex64::default(); 4], 20.0, &StepPolicy::default(), 1.0).unwrap();
    assert_eq!(traj.times[0], 0.0);
    assert_eq!(traj.times.len(), 21);
    assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
    assert!(traj.states.iter().flatten().all(|v| *v == Complex64::default()));
}

#[test]
fn half_step_rerun_agrees() {
    let key = ModeKey::new(1, 0.0).unwrap();
    let params = PhysParams::new(1.4, 1.0).unwrap();
    let sys = WeightedSystem::homogeneous(key, params, Convention::Derived);
    let z0 = [c(1.0, 0.0), c(0.0, (-0.5f64).exp())];
    let a = integrate(&sys, z0, 10.0, &tight(), 10.0).unwrap();
    let b = integrate(&sys, z0, 10.0, &tight().halved(), 10.0).unwrap();
    let d = a.last().iter().zip(b.last()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    assert!(d < 1e-8, "half-step difference {d:e}");
}

#[test]
fn final_state_converges_at_fourth_order() {
    let key = ModeKey::new(1, 1.5).unwrap();
    let params = PhysParams::new(1.4, 1.0).unwrap();
    let sys = FullSystem {
        key,
        params,
        convention: Convention::Derived,
    };
    let y0 = [c(1.0, 0.0), c(0.0, 0.5), c(-0.3, 0.0), c(0.2, 0.1)];
    // A loose tolerance turns off step rejection, leaving fixed steps.
    let fixed = |h: f64| StepPolicy {
        base_dt: h,
        c_osc: 1e6,
        tol: 1e6,
        ..StepPolicy::default()
    };
    let reference = *integrate(&sys, y0, 4.0, &fixed(1e-3), 4.0).unwrap().last();
    let err = |h: f64| {
        let y = integrate(&sys, y0, 4.0, &fixed(h), 4.0).unwrap();
        y.last().iter().zip(&reference).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    };
    let (e1, e2) = (err(0.2), err(0.1));
    let order = (e1 / e2).log2();
    assert!((3.7..4.3).contains(&order), "observed order {order} ({e1:e}, {e2:e})");
}

#[test]
fn homogeneous_weighted_norm_stays_bounded() {
    let policy = StepPolicy::default();
    for m in [0.5, 1.0, 2.0] {
        let params = PhysParams::new(1.4, m).unwrap();
        for k in [1, 2, 3] {
            for eta in [-10.0, -3.0, 0.0, 2.0, 7.0] {
                let key = ModeKey::new(k, eta).unwrap();
                let sys = WeightedSystem::homogeneous(key, params, Convention::Derived);
                let z0 = [c(0.6, 0.0), c(0.0, 0.8)];
                let traj = integrate(&sys, z0, 100.0, &policy, 1.0).unwrap();
                for s in &traj.states {
                    let r = WeightedState::from_array(*s).norm();
                    assert!((0.1..=10.0).contains(&r), "k={k} η={eta} M={m}: ratio {r}");
                }
            }
        }
    }
}

#[test]
fn propagator_identity_composition_and_determinant() {
    let key = ModeKey::new(2, 1.0).unwrap();
    let params = PhysParams::new(1.4, 0.7).unwrap();
    let conv = Convention::Derived;
    let p = tight();
    let id = propagator(key, params, conv, 3.0, 3.0, &p).unwrap();
    assert_eq!(id, [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]);

    let full = propagator(key, params, conv, 0.0, 5.0, &p).unwrap();
    let first = propagator(key, params, conv, 0.0, 2.0, &p).unwrap();
    let second = propagator(key, params, conv, 2.0, 5.0, &p).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let prod = second[i][0] * first[0][j] + second[i][1] * first[1][j];
            assert!((prod - full[i][j]).norm() < 1e-6, "entry ({i},{j})");
        }
    }
    for m in [full, first, second] {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        assert!((det - 1.0).norm() < 1e-8, "det = {det}");
    }

    let back = propagator(key, params, conv, 5.0, 0.0, &p).unwrap();
    let prod = back[0][0] * full[0][0] + back[0][1] * full[1][0];
    assert!((prod - 1.0).norm() < 1e-8);
}

#[test]
fn duhamel_matches_direct_integration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let params = PhysParams::new(1.4, 1.0).unwrap();
    let p = tight();
    for _ in 0..5 {
        let key = ModeKey::new(rng.gen_range(1..=3), rng.gen_range(-5.0..5.0)).unwrap();
        let zin = WeightedState::new(
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        );
        let source = c(1.0, 0.0);
        let sys = WeightedSystem {
            key,
            params,
            convention: Convention::Derived,
            source,
        };
        let direct = WeightedState::from_array(*integrate(&sys, zin.to_array(), 20.0, &p, 20.0).unwrap().last());
        let duh = duhamel_solve(zin, source, key, params, Convention::Derived, 20.0, &p).unwrap();
        let scale = direct.norm();
        assert!(rel(direct.z1, duh.z1, scale) < 1e-6 && rel(direct.z2, duh.z2, scale) < 1e-6);
    }
}

#[test]
fn duhamel_without_source_is_the_propagator() {
    let key = ModeKey::new(1, -2.0).unwrap();
    let params = PhysParams::new(2.0, 0.5).unwrap();
    let p = tight();
    let zin = WeightedState::new(c(0.3, -0.1), c(0.5, 0.2));
    let z = duhamel_solve(zin, c(0.0, 0.0), key, params, Convention::Derived, 7.0, &p).unwrap();
    let phi = propagator(key, params, Convention::Derived, 0.0, 7.0, &p).unwrap();
    let z1 = phi[0][0] * zin.z1 + phi[0][1] * zin.z2;
    let z2 = phi[1][0] * zin.z1 + phi[1][1] * zin.z2;
    assert!((z.z1 - z1).norm() < 1e-12 && (z.z2 - z2).norm() < 1e-12);
    let zero = duhamel_solve(WeightedState::default(), c(0.0, 0.0), key, params, Convention::Derived, 7.0, &p).unwrap();
    assert_eq!(zero, WeightedState::default());
}

#[test]
fn all_formulations_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // Per-step errors accumulate over the many oscillations up to t = 30.
    let p = StepPolicy {
        tol: 1e-13,
        ..StepPolicy::default()
    };
    for conv in [Convention::Derived, Convention::Printed] {
        for _ in 0..4 {
            let params = PhysParams::new(rng.gen_range(1.1..2.0), rng.gen_range(0.5..2.0)).unwrap();
            let key = ModeKey::new(rng.gen_range(1..=3), rng.gen_range(-10.0..10.0)).unwrap();
            let g = params.gamma;
            let mut draw = || c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let s0 = FullModeState {
                r: draw(),
                a: draw(),
                omega: draw(),
                theta: draw(),
            };
            let source = s0.beta() + s0.gamma_invariant(g);
            let t = 30.0;

            let full = FullSystem {
                key,
                params,
                convention: conv,
            };
            let f = FullModeState::from_array(*integrate(&full, s0.to_array(), t, &p, t).unwrap().last());
            let (d_full, a_full) = (f.delta(g), f.a);

            let un = UnweightedSystem {
                key,
                params,
                convention: conv,
                source,
            };
            let u = *integrate(&un, [s0.delta(g), s0.a], t, &p, t).unwrap().last();

            let zin = weight(s0.delta(g), s0.a, 0.0, key, params);
            let ws = WeightedSystem {
                key,
                params,
                convention: conv,
                source,
            };
            let w = WeightedState::from_array(*integrate(&ws, zin.to_array(), t, &p, t).unwrap().last());
            let (d_w, a_w) = unweight(w, t, key, params);

            let dz = duhamel_solve(zin, source, key, params, conv, t, &p).unwrap();
            let (d_d, a_d) = unweight(dz, t, key, params);

            let scale = (d_full.norm_sqr() + a_full.norm_sqr()).sqrt();
            for (d, a) in [(u[0], u[1]), (d_w, a_w), (d_d, a_d)] {
                let e = ((d - d_full).norm_sqr() + (a - a_full).norm_sqr()).sqrt() / scale;
                assert!(e < 1e-6, "{conv:?} {key:?}: relative difference {e:e}");
            }
        }
    }
}

#[test]
fn transported_invariants_hold_to_long_times() {
    let params = PhysParams::new(1.4, 1.0).unwrap();
    let key = ModeKey::new(1, 2.0).unwrap();
    let sys = FullSystem {
        key,
        params,
        convention: Convention::Derived,
    };
    let s0 = FullModeState {
        r: c(1.0, 0.2),
        a: c(-0.4, 0.0),
        omega: c(0.3, -0.5),
        theta: c(0.1, 0.1),
    };
    let traj = integrate(&sys, s0.to_array(), 1000.0, &StepPolicy::default(), 50.0).unwrap();
    let size = s0.to_array().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    for s in &traj.states {
        let f = FullModeState::from_array(*s);
        assert!((f.beta() - s0.beta()).norm() < 1e-10 * (1.0 + size));
        assert!((f.gamma_invariant(1.4) - s0.gamma_invariant(1.4)).norm() < 1e-10 * (1.0 + size));
    }
}

#[test]
fn forced_weighted_state_stays_comparable_to_data() {
    let p = StepPolicy::default();
    let mut worst = 0.0f64;
    for m in [0.5, 1.0] {
        let params = PhysParams::new(1.4, m).unwrap();
        for (k, eta) in [(1, 0.0), (1, 5.0), (2, -3.0), (3, 1.0)] {
            let key = ModeKey::new(k, eta).unwrap();
            for (zin, source) in [
                (WeightedState::new(c(1.0, 0.0), c(0.0, 0.0)), c(0.0, 0.0)),
                (WeightedState::default(), c(1.0, 0.0)),
                (WeightedState::new(c(0.3, 0.3), c(-0.2, 0.5)), c(0.0, -1.0)),
            ] {
                let sys = WeightedSystem {
                    key,
                    params,
                    convention: Convention::Derived,
                    source,
                };
                let traj = integrate(&sys, zin.to_array(), 100.0, &p, 1.0).unwrap();
                let rhs = zin.norm() + source.norm() / params.gamma;
                for s in &traj.states {
                    worst = worst.max(WeightedState::from_array(*s).norm() / rhs);
                }
            }
        }
    }
    assert!(worst.is_finite() && worst < 20.0, "constant {worst}");
}

#[test]
fn step_budget_is_enforced() {
    let key = ModeKey::new(1, 0.0).unwrap();
    let params = PhysParams::new(1.4, 1.0).unwrap();
    let sys = WeightedSystem::homogeneous(key, params, Convention::Derived);
    let policy = StepPolicy {
        max_steps: 10,
        ..StepPolicy::default()
    };
    let err = integrate(&sys, [c(1.0, 0.0), c(0.0, 0.0)], 100.0, &policy, 100.0).unwrap_err();
    assert!(matches!(err, Error::StepLimit { limit: 10, .. }));
    assert!(integrate(&sys, [c(1.0, 0.0), c(0.0, 0.0)], -1.0, &policy, 1.0).is_err());
}
