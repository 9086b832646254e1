//! Per-mode integration of a whole spectral field.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{integrate, FullModeState, FullSystem, StepPolicy, StepStats};
use crate::error::{Error, Result};
use crate::fields::DeltaField;
use crate::spectral::{EtaGrid, InitialFields, ModeKey, PhysParams, SpectralField};
use crate::symbols::Convention;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Integration settings shared by every mode of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunPlan {
    pub params: PhysParams,
    pub convention: Convention,
    pub policy: StepPolicy,
    pub t_end: f64,
    pub sample_dt: f64,
}

/// Full four-field state of every `k > 0` mode at the sample times. The
/// `k < 0` half follows from Hermitian symmetry.
#[derive(Debug, Clone)]
pub struct SpectralRun {
    pub plan: RunPlan,
    pub grid: EtaGrid,
    pub times: Vec<f64>,
    /// Positive wavenumbers, one row each.
    pub ks: Vec<i32>,
    /// `modes[row * n_eta + j][sample]`; empty for modes that are zero
    /// throughout.
    modes: Vec<Vec<[Complex64; 4]>>,
    pub stats: StepStats,
}

/// Four sheared-frame spectra at one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct FullFields {
    pub r: SpectralField,
    pub a: SpectralField,
    pub omega: SpectralField,
    pub theta: SpectralField,
}

impl SpectralRun {
    /// Integrates every mode of `init` with the full four-field system.
    pub fn evolve(init: &InitialFields, plan: RunPlan) -> Result<Self> {
        plan.policy.validate()?;
        let grid = *init.rho.grid();
        for f in [&init.alpha, &init.omega, &init.theta] {
            init.rho.check_layout(f)?;
        }
        if init.rho.shear() != 0.0 {
            return Err(Error::GridMismatch("initial data must be unsheared".into()));
        }
        let all = init.rho.ks().to_vec();
        let ks: Vec<i32> = all.iter().copied().filter(|&k| k > 0).collect();
        for &k in &ks {
            if !all.contains(&-k) {
                return Err(Error::InvalidInitialData(format!("k = {k} lacks its conjugate row")));
            }
        }
        let n = grid.len();
        let jobs: Vec<(i32, usize, [Complex64; 4])> = ks
            .iter()
            .flat_map(|&k| {
                let ki = init.rho.k_index(k).expect("row exists");
                (0..n).map(move |j| {
                    (
                        k,
                        j,
                        [
                            init.rho.get(ki, j),
                            init.alpha.get(ki, j),
                            init.omega.get(ki, j),
                            init.theta.get(ki, j),
                        ],
                    )
                })
            })
            .collect();

        let results: Vec<(Vec<[Complex64; 4]>, StepStats, Vec<f64>)> = jobs
            .par_iter()
            .map(|&(k, j, y0)| {
                if y0.iter().all(|v| *v == ZERO) {
                    return Ok((Vec::new(), StepStats::default(), Vec::new()));
                }
                let key = ModeKey::new(k, grid.point(j))?;
                let sys = FullSystem {
                    key,
                    params: plan.params,
                    convention: plan.convention,
                };
                let traj = integrate(&sys, y0, plan.t_end, &plan.policy, plan.sample_dt)?;
                Ok((traj.states, traj.stats, traj.times))
            })
            .collect::<Result<_>>()?;

        let mut times = crate::dynamics::sample_times(0.0, plan.t_end, plan.sample_dt);
        times.insert(0, 0.0);
        let mut stats = StepStats::default();
        let mut modes = Vec::with_capacity(results.len());
        for (states, st, tt) in results {
            if !tt.is_empty() && tt != times {
                return Err(Error::InvalidHorizon("modes disagree on sample times".into()));
            }
            stats.accepted += st.accepted;
            stats.rejected += st.rejected;
            modes.push(states);
        }
        Ok(SpectralRun {
            plan,
            grid,
            times,
            ks,
            modes,
            stats,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.times.len()
    }

    /// State of mode `(ks[row], η_j)` at sample `n`.
    pub fn state(&self, row: usize, j: usize, n: usize) -> [Complex64; 4] {
        let m = &self.modes[row * self.grid.len() + j];
        if m.is_empty() {
            [ZERO; 4]
        } else {
            m[n]
        }
    }

    /// All four fields at sample `n`, with the negative-k rows filled by
    /// Hermitian symmetry.
    pub fn fields(&self, n: usize) -> Result<FullFields> {
        let mut all: Vec<i32> = self.ks.iter().map(|k| -k).collect();
        all.extend(&self.ks);
        let zero = SpectralField::zeros(self.grid, &all)?;
        let mut out = [zero.clone(), zero.clone(), zero.clone(), zero];
        for (row, &k) in self.ks.iter().enumerate() {
            let (pos, neg) = (out[0].k_index(k).expect("row"), out[0].k_index(-k).expect("row"));
            for j in 0..self.grid.len() {
                let s = self.state(row, j, n);
                for (f, v) in out.iter_mut().zip(s) {
                    f.set(pos, j, v);
                    f.set(neg, self.grid.mirror(j), v.conj());
                }
            }
        }
        let [r, a, omega, theta] = out;
        Ok(FullFields { r, a, omega, theta })
    }

    /// `δ̂ = (R̂ + Θ̂)/γ` at sample `n`.
    pub fn delta(&self, n: usize) -> Result<DeltaField> {
        let f = self.fields(n)?;
        let g = self.plan.params.gamma;
        Ok(DeltaField {
            delta: SpectralField::linear_combination(&[(1.0 / g, &f.r), (1.0 / g, &f.theta)])?,
        })
    }

    /// Largest relative drift of `β̂`, `Γ̂`, `σ̂` at sample `n` over all
    /// modes, each relative to its own largest initial magnitude.
    pub fn invariant_drift(&self, n: usize) -> [f64; 3] {
        let g = self.plan.params.gamma;
        let inv = |s: [Complex64; 4]| {
            let f = FullModeState::from_array(s);
            [f.beta(), f.gamma_invariant(g), f.sigma(g)]
        };
        let mut scale = [0.0f64; 3];
        let mut drift = [0.0f64; 3];
        for row in 0..self.ks.len() {
            for j in 0..self.grid.len() {
                let a = inv(self.state(row, j, 0));
                let b = inv(self.state(row, j, n));
                for c in 0..3 {
                    scale[c] = scale[c].max(a[c].norm());
                    drift[c] = drift[c].max((b[c] - a[c]).norm());
                }
            }
        }
        [0, 1, 2].map(|c| if scale[c] > 0.0 { drift[c] / scale[c] } else { drift[c] })
    }
}
