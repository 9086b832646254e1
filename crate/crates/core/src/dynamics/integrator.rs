//! Classical RK4 with step-doubling error control for linear, nonautonomous
//! per-mode systems `y' = A(t) y + b(t)`.
//!
//! Every accepted step of size `h` is made of two half steps; the full step
//! is only used for the error estimate. The step obeys
//! `h ≤ min(base_dt, c_osc / ω(t))` where `ω = √p / M` is the acoustic
//! frequency of the mode, so the oscillation stays resolved at late times.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Coefficients, LinearModeSystem};
use crate::error::{Error, Result};
use crate::spectral::{ModeKey, PhysParams};
use crate::symbols::Convention;

/// Smallest admissible step.
pub const MIN_STEP: f64 = 1e-12;

/// Default bound on accepted plus rejected steps per mode.
pub const DEFAULT_MAX_STEPS: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepPolicy {
    pub base_dt: f64,
    pub c_osc: f64,
    pub tol: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
}

fn default_max_steps() -> u64 {
    DEFAULT_MAX_STEPS
}

impl Default for StepPolicy {
    fn default() -> Self {
        StepPolicy {
            base_dt: 0.1,
            c_osc: 0.1,
            tol: 1e-8,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }
}

impl StepPolicy {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("base_dt", self.base_dt), ("c_osc", self.c_osc), ("tol", self.tol)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("step policy {name} must be positive (got {v})")));
            }
        }
        Ok(())
    }

    /// Same policy with both step bounds halved.
    pub fn halved(&self) -> Self {
        StepPolicy {
            base_dt: 0.5 * self.base_dt,
            c_osc: 0.5 * self.c_osc,
            ..*self
        }
    }

    /// Largest step allowed at a point where the acoustic frequency is `omega`.
    pub fn cap(&self, omega: f64) -> f64 {
        self.base_dt.min(self.c_osc / omega)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryMeta {
    pub key: ModeKey,
    pub params: PhysParams,
    pub convention: Convention,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct StepStats {
    pub accepted: u64,
    pub rejected: u64,
}

/// Time-sampled states of one run.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[Complex64; N]>,
    pub meta: TrajectoryMeta,
    pub stats: StepStats,
}

impl<const N: usize> Trajectory<N> {
    pub fn last(&self) -> &[Complex64; N] {
        self.states.last().expect("trajectory holds the initial state")
    }
}

/// One accepted step: `y0` at `t0`, the half-step state at `t0 + h/2`, `y1`
/// at `t0 + h`.
#[derive(Debug, Clone, Copy)]
pub struct StepRecord<const N: usize> {
    pub t0: f64,
    pub h: f64,
    pub y0: [Complex64; N],
    pub y_mid: [Complex64; N],
    pub y1: [Complex64; N],
}

#[inline]
fn axpy<const N: usize>(y: &[Complex64; N], h: f64, k: &[Complex64; N]) -> [Complex64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += k[i] * h;
    }
    out
}

/// One classical RK4 step with the coefficients at `t`, `t + h/2`, `t + h`.
#[inline]
fn rk4<const N: usize>(
    y: &[Complex64; N],
    h: f64,
    c0: &Coefficients<N>,
    cm: &Coefficients<N>,
    c1: &Coefficients<N>,
) -> [Complex64; N] {
    let k1 = c0.apply(y);
    let k2 = cm.apply(&axpy(y, 0.5 * h, &k1));
    let k3 = cm.apply(&axpy(y, 0.5 * h, &k2));
    let k4 = c1.apply(&axpy(y, h, &k3));
    let mut out = *y;
    let w = h / 6.0;
    for i in 0..N {
        out[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w;
    }
    out
}

fn max_abs<const N: usize>(y: &[Complex64; N]) -> f64 {
    y.iter().fold(0.0, |m, v| m.max(v.re.abs()).max(v.im.abs()))
}

/// Output times after `t_start`: multiples of `sample_dt`, then `t_end`.
pub fn sample_times(t_start: f64, t_end: f64, sample_dt: f64) -> Vec<f64> {
    let eps = 1e-9 * sample_dt;
    let mut out = Vec::new();
    let mut i = 1u64;
    loop {
        let t = t_start + i as f64 * sample_dt;
        if t >= t_end - eps {
            break;
        }
        out.push(t);
        i += 1;
    }
    out.push(t_end);
    out
}

/// Integrates from `t = 0` and samples at multiples of `sample_dt` (plus
/// `t_end`).
pub fn integrate<const N: usize, S: LinearModeSystem<N>>(
    sys: &S,
    y0: [Complex64; N],
    t_end: f64,
    policy: &StepPolicy,
    sample_dt: f64,
) -> Result<Trajectory<N>> {
    integrate_with(sys, 0.0, y0, t_end, policy, sample_dt, |_| {})
}

/// General form of [`integrate`]: arbitrary start time and a callback on
/// every accepted step.
pub fn integrate_with<const N: usize, S: LinearModeSystem<N>>(
    sys: &S,
    t_start: f64,
    y0: [Complex64; N],
    t_end: f64,
    policy: &StepPolicy,
    sample_dt: f64,
    mut on_step: impl FnMut(&StepRecord<N>),
) -> Result<Trajectory<N>> {
    policy.validate()?;
    if !(t_end.is_finite() && t_end > t_start) {
        return Err(Error::InvalidHorizon(format!(
            "need t_end > t_start (got {t_start} → {t_end})"
        )));
    }
    if !(sample_dt.is_finite() && sample_dt > 0.0) {
        return Err(Error::InvalidHorizon(format!("sample interval must be positive (got {sample_dt})")));
    }
    let key = sys.key();
    let targets = sample_times(t_start, t_end, sample_dt);
    let mut next_sample = 0usize;

    let mut times = vec![t_start];
    let mut states = vec![y0];
    let mut stats = StepStats::default();

    let mut t = t_start;
    let mut y = y0;
    let mut h_prop = policy.cap(sys.frequency(t));
    let mut c0 = sys.coefficients(t);

    loop {
        let target = targets[next_sample];
        let cap = policy.cap(sys.frequency(t));
        let mut h = h_prop.min(cap);
        let mut hits = false;
        if t + h >= target - 1e-12 * target.abs().max(1.0) {
            h = target - t;
            hits = true;
        }
        if h < MIN_STEP {
            if hits && h >= 0.0 {
                // Already at the target up to rounding.
                t = target;
                c0 = sys.coefficients(t);
                times.push(t);
                states.push(y);
                if next_sample + 1 == targets.len() {
                    break;
                }
                next_sample += 1;
                continue;
            }
            return Err(Error::StepUnderflow {
                t,
                k: key.k(),
                eta: key.eta(),
                dt: h,
            });
        }
        if stats.accepted + stats.rejected >= policy.max_steps {
            return Err(Error::StepLimit {
                limit: policy.max_steps,
                t,
                k: key.k(),
                eta: key.eta(),
            });
        }

        let cq = sys.coefficients(t + 0.25 * h);
        let cm = sys.coefficients(t + 0.5 * h);
        let c3 = sys.coefficients(t + 0.75 * h);
        let t1 = if hits { target } else { t + h };
        let c1 = sys.coefficients(t1);

        let full = rk4(&y, h, &c0, &cm, &c1);
        let mid = rk4(&y, 0.5 * h, &c0, &cq, &cm);
        let half = rk4(&mid, 0.5 * h, &cm, &c3, &c1);

        let mut diff = half;
        for i in 0..N {
            diff[i] -= full[i];
        }
        let err = max_abs(&diff) / 15.0;
        let scale = policy.tol * (1.0 + max_abs(&half));
        let ratio = if err > 0.0 { scale / err } else { f64::INFINITY };
        let factor = (0.9 * ratio.powf(0.2)).clamp(0.2, 4.0);

        if err <= scale {
            stats.accepted += 1;
            on_step(&StepRecord {
                t0: t,
                h: t1 - t,
                y0: y,
                y_mid: mid,
                y1: half,
            });
            y = half;
            t = t1;
            c0 = c1;
            if !hits {
                h_prop = h * factor;
            } else {
                h_prop = h_prop.max(h);
                times.push(t);
                states.push(y);
                if next_sample + 1 == targets.len() {
                    break;
                }
                next_sample += 1;
            }
        } else {
            stats.rejected += 1;
            h_prop = h * factor;
            if h_prop < MIN_STEP {
                return Err(Error::StepUnderflow {
                    t,
                    k: key.k(),
                    eta: key.eta(),
                    dt: h_prop,
                });
            }
        }
    }

    Ok(Trajectory {
        times,
        states,
        meta: TrajectoryMeta {
            key,
            params: sys.params(),
            convention: sys.convention(),
        },
        stats,
    })
}
