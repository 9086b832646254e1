//! Parameter sweeps with seeded random data, and the homogeneous Lyapunov
//! sweep.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use super::config::RunConfig;
use super::run::execute;
use crate::dynamics::{integrate, StepPolicy, WeightedSystem};
use crate::error::{Error, Result};
use crate::spectral::{GaussianProfile, Harmonic, InitialDataSpec, ModeKey, PacketSpec, PhysParams};
use crate::symbols::{lyap_energy, Convention, LyapCoeffs, WeightedState};

/// Random Gaussian packets on `k_set`: centers in `[−1, 1]`, widths in
/// `[0.8, 1.2]`, amplitudes in `[0.5, 1.5]` and uniform phases.
pub fn random_initial(rng: &mut ChaCha8Rng, k_set: &[i32]) -> InitialDataSpec {
    let mut packet = || PacketSpec {
        harmonics: k_set
            .iter()
            .map(|&k| Harmonic {
                k,
                amplitude: Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI)),
            })
            .collect(),
        profile: GaussianProfile {
            center: rng.gen_range(-1.0..1.0),
            width: rng.gen_range(0.8..1.2),
            amplitude: rng.gen_range(0.5..1.5),
        },
    };
    InitialDataSpec {
        rho: packet(),
        alpha: packet(),
        omega: packet(),
        theta: packet(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub gamma: f64,
    pub mach: f64,
    /// Index of the random draw; `None` for the configured data.
    pub sample: Option<usize>,
    pub invariants_pass: bool,
    pub pvx_exponent: Option<f64>,
    pub pvy_exponent: Option<f64>,
    pub compressible_exponent: Option<f64>,
    pub theorem_constants: [f64; 3],
}

/// Runs every `(γ, M, sample)` of `cfg.sweep`. Each sample uses its own
/// generator seeded from `cfg.seed` and its index, so the result does not
/// depend on scheduling.
pub fn run_sweep(cfg: &RunConfig) -> Result<Vec<SweepPoint>> {
    let spec = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("configuration has no [sweep] section".into()))?;
    let gammas = if spec.gamma.is_empty() { vec![cfg.params.gamma] } else { spec.gamma.clone() };
    let machs = if spec.mach.is_empty() { vec![cfg.params.mach] } else { spec.mach.clone() };
    let draws: Vec<Option<usize>> = if spec.samples == 0 {
        vec![None]
    } else {
        (0..spec.samples).map(Some).collect()
    };
    let mut jobs = Vec::new();
    for &g in &gammas {
        for &m in &machs {
            for &d in &draws {
                jobs.push((g, m, d));
            }
        }
    }
    jobs.par_iter()
        .map(|&(gamma, mach, sample)| {
            let params = PhysParams::new(gamma, mach)?;
            let mut c = cfg.with_params(params, cfg.out_dir.clone());
            if let Some(i) = sample {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(i as u64);
                c.initial = random_initial(&mut rng, &cfg.k_set);
            }
            let out = execute(&c)?;
            let th = &out.report.theorem_constants;
            Ok(SweepPoint {
                gamma,
                mach,
                sample,
                invariants_pass: out.report.invariants_pass(),
                pvx_exponent: out.report.fits.pvx.as_ref().map(|f| f.exponent),
                pvy_exponent: out.report.fits.pvy.as_ref().map(|f| f.exponent),
                compressible_exponent: out.report.fits.compressible.as_ref().map(|f| f.exponent),
                theorem_constants: [
                    th.incompressible_x.constant,
                    th.incompressible_y.constant,
                    th.compressible_growth.constant,
                ],
            })
        })
        .collect()
}

/// CSV rendering of a sweep, one row per point.
pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.12e}")).unwrap_or_else(|| "nan".into());
    let mut out = String::from(
        "gamma,mach,sample,invariants_pass,pvx_exponent,pvy_exponent,compressible_exponent,c_x,c_y,c_growth\n",
    );
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{:.12e},{:.12e},{:.12e}\n",
            p.gamma,
            p.mach,
            p.sample.map(|s| s.to_string()).unwrap_or_else(|| "config".into()),
            p.invariants_pass,
            opt(p.pvx_exponent),
            opt(p.pvy_exponent),
            opt(p.compressible_exponent),
            p.theorem_constants[0],
            p.theorem_constants[1],
            p.theorem_constants[2],
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LyapunovSample {
    pub k: i32,
    pub eta: f64,
    pub mach: f64,
    /// Extremes of `E(t)/E(0)` over the samples.
    pub energy_ratio: [f64; 2],
    /// Extremes of `|Z(t)|/|Z(0)|` over the samples.
    pub norm_ratio: [f64; 2],
}

/// Homogeneous weighted runs from a random unit `Z(0)` for every
/// `(k, η, M)`, sampled every `sample_dt` up to `t_end`.
pub fn lyapunov_sweep(
    keys: &[ModeKey],
    machs: &[f64],
    gamma: f64,
    convention: Convention,
    t_end: f64,
    sample_dt: f64,
    policy: &StepPolicy,
    seed: u64,
) -> Result<Vec<LyapunovSample>> {
    let mut jobs = Vec::new();
    for &m in machs {
        for &key in keys {
            jobs.push((key, m));
        }
    }
    jobs.par_iter()
        .enumerate()
        .map(|(i, &(key, mach))| {
            let params = PhysParams::new(gamma, mach)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut z = [0.0f64; 4].map(|_| rng.gen_range(-1.0..1.0));
            let n = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            z.iter_mut().for_each(|v| *v /= n);
            let z0 = [Complex64::new(z[0], z[1]), Complex64::new(z[2], z[3])];
            let sys = WeightedSystem::homogeneous(key, params, convention);
            let traj = integrate(&sys, z0, t_end, policy, sample_dt)?;
            let e0 = lyap_energy(&WeightedState::from_array(z0), &LyapCoeffs::at(0.0, key, params, convention));
            let mut er = [f64::INFINITY, 0.0f64];
            let mut nr = [f64::INFINITY, 0.0f64];
            for (t, s) in traj.times.iter().zip(&traj.states) {
                let w = WeightedState::from_array(*s);
                let e = lyap_energy(&w, &LyapCoeffs::at(*t, key, params, convention)) / e0;
                er = [er[0].min(e), er[1].max(e)];
                nr = [nr[0].min(w.norm()), nr[1].max(w.norm())];
            }
            Ok(LyapunovSample {
                k: key.k(),
                eta: key.eta(),
                mach,
                energy_ratio: er,
                norm_ratio: nr,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MarginReport {
    pub samples: usize,
    pub violations: usize,
    /// Smallest `bd − 8a²` seen.
    pub min_slack: f64,
}

/// Checks `8a² ≤ bd` at `n` random points with `k ∈ ±[1, 20]`,
/// `η ∈ [−50, 50]`, `t ∈ [0, 500]`, `M ∈ [0.1, 2]`.
pub fn sample_margin(n: usize, gamma: f64, convention: Convention, seed: u64) -> Result<MarginReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for _ in 0..n {
        let k = rng.gen_range(1..=20) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let key = ModeKey::new(k, rng.gen_range(-50.0..50.0))?;
        let params = PhysParams::new(gamma, rng.gen_range(0.1..2.0))?;
        let c = LyapCoeffs::at(rng.gen_range(0.0..500.0), key, params, convention);
        if !c.margin_holds() {
            violations += 1;
        }
        min_slack = min_slack.min(c.b * c.d - 8.0 * c.a * c.a);
    }
    Ok(MarginReport {
        samples: n,
        violations,
        min_slack,
    })
}
