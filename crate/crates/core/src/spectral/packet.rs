use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{EtaGrid, SpectralField};
use crate::error::{Error, Result};

/// Minimum number of spectral Gaussian widths `1/w` the η grid must cover.
pub const MIN_GRID_WIDTHS: f64 = 8.0;

/// One x-harmonic `c e^{ikx}` of a packet; the conjugate partner at `-k` is
/// implied so that the physical field is real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub k: i32,
    pub amplitude: Complex64,
}

/// `A exp(-(y - c)² / (2w²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianProfile {
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
}

impl GaussianProfile {
    pub fn eval(&self, y: f64) -> f64 {
        let z = (y - self.center) / self.width;
        self.amplitude * (-0.5 * z * z).exp()
    }

    /// `∫ e^{-iηy} G(y) dy = A w √(2π) e^{-w²η²/2} e^{-icη}`.
    pub fn transform(&self, eta: f64) -> Complex64 {
        let w = self.width;
        let mag = self.amplitude * w * (2.0 * PI).sqrt() * (-0.5 * w * w * eta * eta).exp();
        Complex64::from_polar(mag, -self.center * eta)
    }
}

/// Initial data of one physical field: `Σ (c e^{ikx} + c.c.) G(y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacketSpec {
    pub harmonics: Vec<Harmonic>,
    pub profile: GaussianProfile,
}

impl PacketSpec {
    pub fn zero() -> Self {
        PacketSpec {
            harmonics: Vec::new(),
            profile: GaussianProfile {
                center: 0.0,
                width: 1.0,
                amplitude: 0.0,
            },
        }
    }

    /// Single harmonic with unit complex amplitude at `k`.
    pub fn single(k: i32, profile: GaussianProfile) -> Self {
        PacketSpec {
            harmonics: vec![Harmonic {
                k,
                amplitude: Complex64::new(1.0, 0.0),
            }],
            profile,
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.harmonics.iter().any(|h| h.k == 0) {
            return Err(Error::InvalidInitialData(format!(
                "{name}: harmonic with k = 0 violates the zero x-mean hypothesis"
            )));
        }
        let w = self.profile.width;
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidInitialData(format!(
                "{name}: Gaussian width must be positive (got {w})"
            )));
        }
        Ok(())
    }

    /// Total complex coefficient of `e^{ikx}` (including conjugate partners).
    pub fn coefficient(&self, k: i32) -> Complex64 {
        let mut c = Complex64::new(0.0, 0.0);
        for h in &self.harmonics {
            if h.k == k {
                c += h.amplitude;
            }
            if h.k == -k {
                c += h.amplitude.conj();
            }
        }
        c
    }

    /// x-Fourier profile `f_k(y)` with `f = Σ_k f_k(y) e^{ikx}`.
    pub fn y_profile(&self, k: i32, y: f64) -> Complex64 {
        self.coefficient(k) * self.profile.eval(y)
    }

    /// `f̂(k, η)` in the crate's Fourier convention.
    pub fn spectrum(&self, k: i32, eta: f64) -> Complex64 {
        self.coefficient(k) * self.profile.transform(eta)
    }

    fn wavenumbers(&self) -> impl Iterator<Item = i32> + '_ {
        self.harmonics.iter().flat_map(|h| [h.k, -h.k])
    }
}

/// Initial data for `(ρ, α, ω, θ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialDataSpec {
    pub rho: PacketSpec,
    pub alpha: PacketSpec,
    pub omega: PacketSpec,
    pub theta: PacketSpec,
}

impl InitialDataSpec {
    pub fn zero() -> Self {
        InitialDataSpec {
            rho: PacketSpec::zero(),
            alpha: PacketSpec::zero(),
            omega: PacketSpec::zero(),
            theta: PacketSpec::zero(),
        }
    }

    pub fn fields(&self) -> [(&'static str, &PacketSpec); 4] {
        [
            ("rho", &self.rho),
            ("alpha", &self.alpha),
            ("omega", &self.omega),
            ("theta", &self.theta),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in self.fields() {
            p.validate(name)?;
        }
        Ok(())
    }

    /// Sorted union of `±k` over every harmonic of every field.
    pub fn wavenumbers(&self) -> Vec<i32> {
        let mut ks: Vec<i32> = self
            .fields()
            .iter()
            .flat_map(|(_, p)| p.wavenumbers().collect::<Vec<_>>())
            .collect();
        ks.sort_unstable();
        ks.dedup();
        ks
    }

    /// Multiply every amplitude by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for p in [&mut out.rho, &mut out.alpha, &mut out.omega, &mut out.theta] {
            p.profile.amplitude *= c;
        }
        out
    }
}

/// Initial fields sampled on a common layout.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialFields {
    pub rho: SpectralField,
    pub alpha: SpectralField,
    pub omega: SpectralField,
    pub theta: SpectralField,
}

/// Transforms the Gaussian packets analytically onto `grid`.
pub fn make_packet(spec: &InitialDataSpec, grid: &EtaGrid) -> Result<InitialFields> {
    spec.validate()?;
    for (name, p) in spec.fields() {
        if p.harmonics.is_empty() || p.profile.amplitude == 0.0 {
            continue;
        }
        let need = MIN_GRID_WIDTHS / p.profile.width;
        if grid.eta_max() < need {
            return Err(Error::InvalidGrid(format!(
                "{name}: eta range ±{} covers fewer than {MIN_GRID_WIDTHS} spectral widths (need ±{need})",
                grid.eta_max()
            )));
        }
    }
    let ks = spec.wavenumbers();
    let build = |p: &PacketSpec| SpectralField::from_fn(*grid, &ks, |k, eta| p.spectrum(k, eta));
    Ok(InitialFields {
        rho: build(&spec.rho)?,
        alpha: build(&spec.alpha)?,
        omega: build(&spec.omega)?,
        theta: build(&spec.theta)?,
    })
}
