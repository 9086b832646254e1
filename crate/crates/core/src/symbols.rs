//! Time-dependent Fourier symbols of the sheared frame, the weighted 2×2
//! system matrices and the Lyapunov functional.
//!
//! In the moving frame `−Δ_L` has symbol `p = k² + (η − kt)²` and
//! `2∂_X(∂_Y − t∂_X)` has symbol `∂_t p = −2k(η − kt)`. The weighted state
//! `Z = (δ̂ / (M p^{1/4}), Â / p^{3/4})` obeys `Z' = L(t) Z + F(t) s` with
//! `s = β̂ⁱⁿ + Γ̂ⁱⁿ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::spectral::{ModeKey, PhysParams};

/// Which form of the lower-left entry of `L(t)` to use.
///
/// `Derived` is what substituting the weights into the per-mode equations of
/// motion produces (`√p/M + 2Mk²/p^{3/2}`). `Printed` doubles the acoustic
/// term (`2√p/M + 2Mk²/p^{3/2}`); it corresponds to doubling the pressure
/// coefficient in every formulation, so all solvers honor it consistently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Derived,
    Printed,
}

impl Convention {
    /// Multiplier on the acoustic (pressure) coupling.
    pub fn acoustic_factor(self) -> f64 {
        match self {
            Convention::Derived => 1.0,
            Convention::Printed => 2.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Convention::Derived => "derived",
            Convention::Printed => "printed",
        }
    }
}

/// Symbol of `−Δ_L` at time `t`.
#[inline]
pub fn symbol_p(t: f64, key: ModeKey) -> f64 {
    let k = key.kf();
    let q = key.eta() - k * t;
    k * k + q * q
}

/// Symbol of `2∂_X(∂_Y − t∂_X)`, equal to `d/dt symbol_p`.
#[inline]
pub fn symbol_dtp(t: f64, key: ModeKey) -> f64 {
    let k = key.kf();
    -2.0 * k * (key.eta() - k * t)
}

/// Both symbols at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolPoint {
    pub t: f64,
    pub key: ModeKey,
    pub p: f64,
    pub dtp: f64,
}

impl SymbolPoint {
    pub fn new(t: f64, key: ModeKey) -> Self {
        SymbolPoint {
            t,
            key,
            p: symbol_p(t, key),
            dtp: symbol_dtp(t, key),
        }
    }

    /// `η − kt`, the sheared y-frequency.
    pub fn q(&self) -> f64 {
        self.key.eta() - self.key.kf() * self.t
    }
}

/// `L(t)` as a row-major 2×2 matrix.
pub fn matrix_l(t: f64, key: ModeKey, params: PhysParams, conv: Convention) -> [[f64; 2]; 2] {
    let c = LyapCoeffs::at(t, key, params, conv);
    [[-c.a, -c.b], [c.d, c.a]]
}

/// `F(t) = (0, −2k² / (γ p^{7/4}))`.
pub fn forcing_f(t: f64, key: ModeKey, params: PhysParams) -> [f64; 2] {
    let p = symbol_p(t, key);
    let k = key.kf();
    let p74 = p * p.sqrt().sqrt().powi(3);
    [0.0, -2.0 * k * k / (params.gamma * p74)]
}

/// `Z = (Z1, Z2)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WeightedState {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl WeightedState {
    pub fn new(z1: Complex64, z2: Complex64) -> Self {
        WeightedState { z1, z2 }
    }

    pub fn norm(&self) -> f64 {
        (self.z1.norm_sqr() + self.z2.norm_sqr()).sqrt()
    }

    pub fn to_array(self) -> [Complex64; 2] {
        [self.z1, self.z2]
    }

    pub fn from_array(a: [Complex64; 2]) -> Self {
        WeightedState { z1: a[0], z2: a[1] }
    }
}

/// `(δ̂, Â) ↦ Z`.
pub fn weight(
    delta: Complex64,
    a: Complex64,
    t: f64,
    key: ModeKey,
    params: PhysParams,
) -> WeightedState {
    let p = symbol_p(t, key);
    let p14 = p.sqrt().sqrt();
    WeightedState {
        z1: delta / (params.mach * p14),
        z2: a / (p14 * p14 * p14),
    }
}

/// Inverse of [`weight`].
pub fn unweight(
    z: WeightedState,
    t: f64,
    key: ModeKey,
    params: PhysParams,
) -> (Complex64, Complex64) {
    let p = symbol_p(t, key);
    let p14 = p.sqrt().sqrt();
    (z.z1 * (params.mach * p14), z.z2 * (p14 * p14 * p14))
}

/// Coefficients `a = ∂_t p / (4p)`, `b = √p / M` and `d` of the Lyapunov
/// functional. `d` follows the same convention as [`matrix_l`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapCoeffs {
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

/// `1 − 1/√8`, the relative lower equivalence constant implied by
/// `8a² ≤ bd`.
pub const LYAP_MARGIN: f64 = 1.0 - std::f64::consts::FRAC_1_SQRT_2 / 2.0;

impl LyapCoeffs {
    #[inline]
    pub fn at(t: f64, key: ModeKey, params: PhysParams, conv: Convention) -> Self {
        let p = symbol_p(t, key);
        let dtp = symbol_dtp(t, key);
        let k = key.kf();
        let sp = p.sqrt();
        let m = params.mach;
        let b = sp / m;
        LyapCoeffs {
            a: 0.25 * dtp / p,
            b,
            d: conv.acoustic_factor() * b + 2.0 * m * k * k / (p * sp),
        }
    }

    /// Whether `8a² ≤ bd`.
    pub fn margin_holds(&self) -> bool {
        8.0 * self.a * self.a <= self.b * self.d
    }

    /// `√(d/b)|Z1|² + √(b/d)|Z2|²`, the diagonal part of `E`.
    pub fn diagonal(&self, z: &WeightedState) -> f64 {
        let r = (self.d / self.b).sqrt();
        r * z.z1.norm_sqr() + z.z2.norm_sqr() / r
    }
}

/// `E = √(d/b)|Z1|² + √(b/d)|Z2|² + 2 a/√(db) Re(Z1 Z̄2)`.
pub fn lyap_energy(z: &WeightedState, c: &LyapCoeffs) -> f64 {
    let cross = (z.z1 * z.z2.conj()).re;
    c.diagonal(z) + 2.0 * c.a / (c.d * c.b).sqrt() * cross
}
