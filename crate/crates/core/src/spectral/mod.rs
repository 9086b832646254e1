//! Physical parameters, frequency grids and the spectral representation of
//! real fields on `T × R`.
//!
//! Fourier convention (used everywhere in the crate):
//!
//! ```text
//! f̂(k, η) = (1/2π) ∬ e^{-i(kx + ηy)} f(x, y) dx dy,   x ∈ [0, 2π), y ∈ R
//! f(x, y) = (1/2π) Σ_k ∫ f̂(k, η) e^{i(kx + ηy)} dη
//! ```
//!
//! With this pairing `‖f‖²_{L²} = Σ_k ∫ |f̂(k, η)|² dη` holds exactly.

mod norm;
mod packet;

pub use norm::{aniso_norm, iso_norm, japanese, sobolev_norm, SobolevWeight};
pub use packet::{
    make_packet, GaussianProfile, Harmonic, InitialDataSpec, InitialFields, PacketSpec, MIN_GRID_WIDTHS,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Ratio of specific heats and reference Mach number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    pub gamma: f64,
    pub mach: f64,
}

impl PhysParams {
    pub fn new(gamma: f64, mach: f64) -> Result<Self> {
        validate_params(PhysParams { gamma, mach })
    }

    /// Acoustic wave speed `1/M`.
    pub fn sound_speed(&self) -> f64 {
        1.0 / self.mach
    }
}

/// Returns `p` unchanged when `γ > 1` and `M > 0`.
pub fn validate_params(p: PhysParams) -> Result<PhysParams> {
    if !(p.gamma.is_finite() && p.gamma > 1.0) {
        return Err(Error::InvalidParams(format!(
            "gamma must be > 1 (got {})",
            p.gamma
        )));
    }
    if !(p.mach.is_finite() && p.mach > 0.0) {
        return Err(Error::InvalidParams(format!(
            "mach must be > 0 (got {})",
            p.mach
        )));
    }
    Ok(p)
}

/// A nonzero x-wavenumber together with a moving-frame y-frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeKey {
    k: i32,
    eta: f64,
}

impl ModeKey {
    pub fn new(k: i32, eta: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroWavenumber);
        }
        if !eta.is_finite() {
            return Err(Error::InvalidGrid(format!("non-finite eta {eta}")));
        }
        Ok(ModeKey { k, eta })
    }

    pub fn k(&self) -> i32 {
        self.k
    }

    pub fn kf(&self) -> f64 {
        self.k as f64
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Time at which the shear aligns the mode, `η/k`.
    pub fn critical_time(&self) -> f64 {
        self.eta / self.kf()
    }
}

/// Uniform grid of y-frequencies, symmetric about zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaGrid {
    eta_min: f64,
    eta_max: f64,
    n: usize,
}

impl EtaGrid {
    pub fn new(eta_min: f64, eta_max: f64, n: usize) -> Result<Self> {
        if !(eta_min.is_finite() && eta_max.is_finite()) || eta_min >= eta_max {
            return Err(Error::InvalidGrid(format!(
                "need eta_min < eta_max (got [{eta_min}, {eta_max}])"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points (got {n})")));
        }
        if (eta_min + eta_max).abs() > 1e-12 * eta_max.abs().max(1.0) {
            return Err(Error::InvalidGrid(format!(
                "grid must be symmetric about 0 (got [{eta_min}, {eta_max}])"
            )));
        }
        Ok(EtaGrid {
            eta_min: -eta_max,
            eta_max,
            n,
        })
    }

    /// Symmetric grid `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    pub fn eta_min(&self) -> f64 {
        self.eta_min
    }

    pub fn eta_max(&self) -> f64 {
        self.eta_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        (self.eta_max - self.eta_min) / (self.n - 1) as f64
    }

    /// The j-th grid point. Mirror points are exact negatives of each other.
    pub fn point(&self, j: usize) -> f64 {
        let m = self.n - 1;
        if 2 * j == m {
            0.0
        } else if 2 * j > m {
            -self.point(m - j)
        } else {
            self.eta_min + j as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    /// Index of `-η_j`.
    pub fn mirror(&self, j: usize) -> usize {
        self.n - 1 - j
    }

    /// Trapezoid-rule quadrature weight of point `j`.
    pub fn weight(&self, j: usize) -> f64 {
        let h = self.spacing();
        if j == 0 || j == self.n - 1 {
            0.5 * h
        } else {
            h
        }
    }

    /// Grid with twice the resolution over the same interval.
    pub fn refined(&self) -> EtaGrid {
        EtaGrid {
            n: 2 * (self.n - 1) + 1,
            ..*self
        }
    }
}

/// Uniform grid on `[-L, L]` used by the method-of-lines solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YGrid {
    half_width: f64,
    n: usize,
}

impl YGrid {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half width must be positive (got {half_width})"
            )));
        }
        if n < 5 {
            return Err(Error::InvalidGrid(format!("need at least 5 points (got {n})")));
        }
        Ok(YGrid { half_width, n })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.n - 1) as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    pub fn refined(&self) -> YGrid {
        YGrid {
            n: 2 * (self.n - 1) + 1,
            ..*self
        }
    }
}

/// Complex amplitudes `f̂(k, η_j)` of a real field.
///
/// Rows are the stored wavenumbers (sorted, nonzero, unique); columns follow
/// the η grid. `shear` relabels the columns: the sample in row `k`, column `j`
/// sits at frequency `η_j − k·shear`. Fields produced by the moving-frame
/// dynamics have `shear = 0`; [`crate::fields::to_physical_frequency`] sets it
/// to `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: EtaGrid,
    ks: Vec<i32>,
    shear: f64,
    amps: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: EtaGrid, ks: &[i32]) -> Result<Self> {
        let mut sorted = ks.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != ks.len() {
            return Err(Error::InvalidGrid("duplicate wavenumbers".into()));
        }
        if sorted.contains(&0) {
            return Err(Error::ZeroWavenumber);
        }
        Ok(SpectralField {
            grid,
            amps: vec![Complex64::new(0.0, 0.0); sorted.len() * grid.len()],
            ks: sorted,
            shear: 0.0,
        })
    }

    /// Field sampled from `f(k, η)` at every stored point.
    pub fn from_fn(
        grid: EtaGrid,
        ks: &[i32],
        f: impl Fn(i32, f64) -> Complex64,
    ) -> Result<Self> {
        let mut out = Self::zeros(grid, ks)?;
        let n = grid.len();
        for (ki, &k) in out.ks.clone().iter().enumerate() {
            for j in 0..n {
                out.amps[ki * n + j] = f(k, grid.point(j));
            }
        }
        Ok(out)
    }

    pub fn grid(&self) -> &EtaGrid {
        &self.grid
    }

    pub fn ks(&self) -> &[i32] {
        &self.ks
    }

    pub fn shear(&self) -> f64 {
        self.shear
    }

    pub(crate) fn with_shear(mut self, shear: f64) -> Self {
        self.shear = shear;
        self
    }

    pub fn k_index(&self, k: i32) -> Option<usize> {
        self.ks.binary_search(&k).ok()
    }

    pub fn row(&self, ki: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.amps[ki * n..(ki + 1) * n]
    }

    pub fn row_mut(&mut self, ki: usize) -> &mut [Complex64] {
        let n = self.grid.len();
        &mut self.amps[ki * n..(ki + 1) * n]
    }

    pub fn get(&self, ki: usize, j: usize) -> Complex64 {
        self.amps[ki * self.grid.len() + j]
    }

    pub fn set(&mut self, ki: usize, j: usize, v: Complex64) {
        let n = self.grid.len();
        self.amps[ki * n + j] = v;
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Frequency of the sample in row `ki`, column `j`.
    pub fn frequency(&self, ki: usize, j: usize) -> f64 {
        self.grid.point(j) - self.ks[ki] as f64 * self.shear
    }

    pub fn is_zero(&self) -> bool {
        self.amps.iter().all(|a| a.re == 0.0 && a.im == 0.0)
    }

    pub fn same_layout(&self, other: &SpectralField) -> bool {
        self.grid == other.grid && self.ks == other.ks && self.shear == other.shear
    }

    pub(crate) fn check_layout(&self, other: &SpectralField) -> Result<()> {
        if self.same_layout(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "fields stored on different layouts (k = {:?} vs {:?})",
                self.ks, other.ks
            )))
        }
    }

    /// Largest violation of `f̂(−k, −η) = conj f̂(k, η)` over stored pairs.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.len();
        let mut worst: f64 = 0.0;
        for (ki, &k) in self.ks.iter().enumerate() {
            let Some(mi) = self.k_index(-k) else { continue };
            for j in 0..n {
                let d = self.get(ki, j) - self.get(mi, self.grid.mirror(j)).conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// Pointwise map `f̂ ↦ g(k, η, f̂)` over stored (moving-frame) frequencies.
    pub fn map(&self, g: impl Fn(i32, f64, Complex64) -> Complex64) -> SpectralField {
        let n = self.grid.len();
        let mut out = self.clone();
        for (ki, &k) in self.ks.iter().enumerate() {
            for j in 0..n {
                let v = self.get(ki, j);
                out.amps[ki * n + j] = g(k, self.grid.point(j), v);
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> SpectralField {
        let mut out = self.clone();
        for a in &mut out.amps {
            *a *= c;
        }
        out
    }

    /// `Σ cᵢ fᵢ` for fields on a common layout.
    pub fn linear_combination(terms: &[(f64, &SpectralField)]) -> Result<SpectralField> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::GridMismatch("empty linear combination".into()));
        };
        let mut out = first.scaled(0.0);
        for (c, f) in terms {
            out.check_layout(f)?;
            for (o, a) in out.amps.iter_mut().zip(&f.amps) {
                *o += *a * *c;
            }
        }
        Ok(out)
    }

    /// Interpolated value at `(k, ξ)` where `ξ` is a frequency in this
    /// field's labelling (see [`SpectralField::frequency`]). Cubic Lagrange
    /// interpolation on the uniform column grid.
    pub fn value_at(&self, k: i32, xi: f64) -> Result<Complex64> {
        let ki = self
            .k_index(k)
            .ok_or_else(|| Error::GridMismatch(format!("wavenumber {k} not stored")))?;
        let offset = k as f64 * self.shear;
        let eta = xi + offset;
        let (lo, hi) = (self.grid.eta_min(), self.grid.eta_max());
        if eta < lo || eta > hi {
            return Err(Error::FrequencyOutOfRange {
                k,
                xi,
                lo: lo - offset,
                hi: hi - offset,
            });
        }
        let n = self.grid.len();
        let h = self.grid.spacing();
        let s = (eta - lo) / h;
        let row = self.row(ki);
        if n < 4 {
            let j = (s.floor() as usize).min(n - 2);
            let w = s - j as f64;
            return Ok(row[j] * (1.0 - w) + row[j + 1] * w);
        }
        let j0 = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..4 {
            let mut l = 1.0;
            for b in 0..4 {
                if a != b {
                    l *= (s - (j0 + b) as f64) / (a as f64 - b as f64);
                }
            }
            acc += row[j0 + a] * l;
        }
        Ok(acc)
    }

    /// Physical-space value `f(x, y)` by direct summation of the discrete
    /// inverse transform.
    pub fn reconstruct(&self, x: f64, y: f64) -> f64 {
        let n = self.grid.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for (ki, &k) in self.ks.iter().enumerate() {
            for j in 0..n {
                let phase = k as f64 * x + self.frequency(ki, j) * y;
                acc += self.get(ki, j) * Complex64::from_polar(self.grid.weight(j), phase);
            }
        }
        acc.re / (2.0 * PI)
    }
}
