//! Per-mode dynamics in the sheared frame.
//!
//! Three formulations of the same linear flow at one `(k, η)`:
//!
//! * [`WeightedSystem`]: `Z' = L(t) Z + F(t) s` for the weighted pair `Z`;
//! * [`UnweightedSystem`]: the same 2×2 system for `(δ̂, Â)`;
//! * [`FullSystem`]: the four fields `(R̂, Â, Ω̂, Θ̂)`.
//!
//! All of them are linear with time-dependent coefficients, which the
//! integrator evaluates once per stage time.

mod duhamel;
mod integrator;

pub use duhamel::{duhamel_solve, propagator, PropagatorSystem};
pub use integrator::{
    integrate, integrate_with, sample_times, StepPolicy, StepRecord, StepStats, Trajectory,
    TrajectoryMeta, DEFAULT_MAX_STEPS, MIN_STEP,
};

use num_complex::Complex64;

use crate::spectral::{ModeKey, PhysParams};
use crate::symbols::{forcing_f, matrix_l, symbol_dtp, symbol_p, Convention, WeightedState};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `A(t)` and `b(t)` of `y' = A(t) y + b(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients<const N: usize> {
    pub matrix: [[f64; N]; N],
    pub forcing: [Complex64; N],
}

impl<const N: usize> Coefficients<N> {
    #[inline]
    pub fn apply(&self, y: &[Complex64; N]) -> [Complex64; N] {
        let mut out = self.forcing;
        for (o, row) in out.iter_mut().zip(&self.matrix) {
            for (a, v) in row.iter().zip(y) {
                if *a != 0.0 {
                    *o += *v * *a;
                }
            }
        }
        out
    }
}

/// A linear per-mode system the integrator can advance.
pub trait LinearModeSystem<const N: usize>: Sync {
    fn key(&self) -> ModeKey;
    fn params(&self) -> PhysParams;
    fn convention(&self) -> Convention;

    fn coefficients(&self, t: f64) -> Coefficients<N>;

    /// Acoustic frequency `√p / M` that bounds the step.
    fn frequency(&self, t: f64) -> f64 {
        symbol_p(t, self.key()).sqrt() / self.params().mach
    }

    fn rhs(&self, t: f64, y: &[Complex64; N]) -> [Complex64; N] {
        self.coefficients(t).apply(y)
    }
}

/// `Z' = L(t) Z + F(t)·source`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedSystem {
    pub key: ModeKey,
    pub params: PhysParams,
    pub convention: Convention,
    /// `β̂ⁱⁿ + Γ̂ⁱⁿ` at this mode.
    pub source: Complex64,
}

impl WeightedSystem {
    pub fn homogeneous(key: ModeKey, params: PhysParams, convention: Convention) -> Self {
        WeightedSystem {
            key,
            params,
            convention,
            source: ZERO,
        }
    }
}

impl LinearModeSystem<2> for WeightedSystem {
    fn key(&self) -> ModeKey {
        self.key
    }
    fn params(&self) -> PhysParams {
        self.params
    }
    fn convention(&self) -> Convention {
        self.convention
    }

    #[inline]
    fn coefficients(&self, t: f64) -> Coefficients<2> {
        let matrix = matrix_l(t, self.key, self.params, self.convention);
        let forcing = if self.source == ZERO {
            [ZERO; 2]
        } else {
            let f = forcing_f(t, self.key, self.params);
            [self.source * f[0], self.source * f[1]]
        };
        Coefficients { matrix, forcing }
    }
}

/// `(δ̂, Â)' = …`, the unweighted 2×2 system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnweightedSystem {
    pub key: ModeKey,
    pub params: PhysParams,
    pub convention: Convention,
    pub source: Complex64,
}

impl LinearModeSystem<2> for UnweightedSystem {
    fn key(&self) -> ModeKey {
        self.key
    }
    fn params(&self) -> PhysParams {
        self.params
    }
    fn convention(&self) -> Convention {
        self.convention
    }

    #[inline]
    fn coefficients(&self, t: f64) -> Coefficients<2> {
        let p = symbol_p(t, self.key);
        let dtp = symbol_dtp(t, self.key);
        let k2 = self.key.kf() * self.key.kf();
        let m2 = self.params.mach * self.params.mach;
        Coefficients {
            matrix: [
                [0.0, -1.0],
                [self.convention.acoustic_factor() * p / m2 + 2.0 * k2 / p, dtp / p],
            ],
            forcing: [ZERO, self.source * (-2.0 * k2 / (self.params.gamma * p))],
        }
    }
}

/// Amplitudes `(R̂, Â, Ω̂, Θ̂)` at one `(k, η)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FullModeState {
    pub r: Complex64,
    pub a: Complex64,
    pub omega: Complex64,
    pub theta: Complex64,
}

impl FullModeState {
    pub fn to_array(self) -> [Complex64; 4] {
        [self.r, self.a, self.omega, self.theta]
    }

    pub fn from_array(v: [Complex64; 4]) -> Self {
        FullModeState {
            r: v[0],
            a: v[1],
            omega: v[2],
            theta: v[3],
        }
    }

    /// `R̂ + Ω̂`.
    pub fn beta(&self) -> Complex64 {
        self.r + self.omega
    }

    /// `Θ̂ + (γ − 1) Ω̂`.
    pub fn gamma_invariant(&self, gamma: f64) -> Complex64 {
        self.theta + self.omega * (gamma - 1.0)
    }

    /// `(γ − 1) R̂ − Θ̂`.
    pub fn sigma(&self, gamma: f64) -> Complex64 {
        self.r * (gamma - 1.0) - self.theta
    }

    /// `δ̂ = (R̂ + Θ̂) / γ`.
    pub fn delta(&self, gamma: f64) -> Complex64 {
        (self.r + self.theta) / gamma
    }
}

/// The four-field system in sheared coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullSystem {
    pub key: ModeKey,
    pub params: PhysParams,
    pub convention: Convention,
}

impl LinearModeSystem<4> for FullSystem {
    fn key(&self) -> ModeKey {
        self.key
    }
    fn params(&self) -> PhysParams {
        self.params
    }
    fn convention(&self) -> Convention {
        self.convention
    }

    #[inline]
    fn coefficients(&self, t: f64) -> Coefficients<4> {
        let p = symbol_p(t, self.key);
        let dtp = symbol_dtp(t, self.key);
        let k2 = self.key.kf() * self.key.kf();
        let PhysParams { gamma, mach } = self.params;
        let c = self.convention.acoustic_factor() * p / (gamma * mach * mach);
        Coefficients {
            matrix: [
                [0.0, -1.0, 0.0, 0.0],
                [c, dtp / p, -2.0 * k2 / p, c],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 1.0 - gamma, 0.0, 0.0],
            ],
            forcing: [ZERO; 4],
        }
    }
}

/// `L(t) Z + F(t)·source`.
pub fn rhs_weighted(
    t: f64,
    z: WeightedState,
    key: ModeKey,
    params: PhysParams,
    source: Complex64,
    convention: Convention,
) -> WeightedState {
    let sys = WeightedSystem {
        key,
        params,
        convention,
        source,
    };
    WeightedState::from_array(sys.rhs(t, &z.to_array()))
}

/// Time derivative of `(R̂, Â, Ω̂, Θ̂)`.
pub fn rhs_full(
    t: f64,
    s: FullModeState,
    key: ModeKey,
    params: PhysParams,
    convention: Convention,
) -> FullModeState {
    let sys = FullSystem {
        key,
        params,
        convention,
    };
    FullModeState::from_array(sys.rhs(t, &s.to_array()))
}
