//! Transported invariants, reconstruction of `(R̂, Θ̂, Ω̂)` from `δ̂`, and the
//! Helmholtz split of the velocity in the sheared frame.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{InitialFields, PhysParams, SpectralField};

/// `β̂ⁱⁿ = ρ̂ⁱⁿ + ω̂ⁱⁿ`, `Γ̂ⁱⁿ = θ̂ⁱⁿ + (γ−1)ω̂ⁱⁿ`, `σ̂ⁱⁿ = (γ−1)ρ̂ⁱⁿ − θ̂ⁱⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Invariants {
    pub beta_in: SpectralField,
    pub gamma_in: SpectralField,
    pub sigma_in: SpectralField,
}

impl Invariants {
    /// `β̂ⁱⁿ + Γ̂ⁱⁿ`, the source of the weighted system.
    pub fn source(&self) -> Result<SpectralField> {
        SpectralField::linear_combination(&[(1.0, &self.beta_in), (1.0, &self.gamma_in)])
    }
}

/// `δ̂ = (R̂ + Θ̂)/γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaField {
    pub delta: SpectralField,
}

pub fn invariants_from_initial(init: &InitialFields, params: PhysParams) -> Result<Invariants> {
    let g = params.gamma;
    Ok(Invariants {
        beta_in: SpectralField::linear_combination(&[(1.0, &init.rho), (1.0, &init.omega)])?,
        gamma_in: SpectralField::linear_combination(&[(1.0, &init.theta), (g - 1.0, &init.omega)])?,
        sigma_in: SpectralField::linear_combination(&[(g - 1.0, &init.rho), (-1.0, &init.theta)])?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedFields {
    pub r: SpectralField,
    pub theta: SpectralField,
    pub omega: SpectralField,
}

/// `Ω̂ = (β̂ⁱⁿ + Γ̂ⁱⁿ)/γ − δ̂`, `R̂ = β̂ⁱⁿ − Ω̂`, `Θ̂ = Γ̂ⁱⁿ − (γ−1)Ω̂`.
pub fn reconstruct_fields(
    delta: &DeltaField,
    inv: &Invariants,
    params: PhysParams,
) -> Result<ReconstructedFields> {
    let g = params.gamma;
    let omega = SpectralField::linear_combination(&[
        (1.0 / g, &inv.beta_in),
        (1.0 / g, &inv.gamma_in),
        (-1.0, &delta.delta),
    ])?;
    let r = SpectralField::linear_combination(&[(1.0, &inv.beta_in), (-1.0, &omega)])?;
    let theta = SpectralField::linear_combination(&[(1.0, &inv.gamma_in), (1.0 - g, &omega)])?;
    Ok(ReconstructedFields { r, theta, omega })
}

/// Moving-frame spectra of `P[v]` and `Q[v]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocitySpectra {
    pub pvx: SpectralField,
    pub pvy: SpectralField,
    pub qvx: SpectralField,
    pub qvy: SpectralField,
}

impl VelocitySpectra {
    /// `V̂^y = P̂^y + Q̂^y`.
    pub fn vy(&self) -> Result<SpectralField> {
        SpectralField::linear_combination(&[(1.0, &self.pvy), (1.0, &self.qvy)])
    }

    /// Largest `|k·P̂x + q·P̂y|` and `|k·Q̂y − q·Q̂x|` at time `t`.
    pub fn structure_defects(&self, t: f64) -> (f64, f64) {
        let grid = self.pvx.grid();
        let (mut div, mut curl): (f64, f64) = (0.0, 0.0);
        for (ki, &k) in self.pvx.ks().iter().enumerate() {
            let kf = k as f64;
            for j in 0..grid.len() {
                let q = grid.point(j) - kf * t;
                div = div.max((self.pvx.get(ki, j) * kf + self.pvy.get(ki, j) * q).norm());
                curl = curl.max((self.qvy.get(ki, j) * kf - self.qvx.get(ki, j) * q).norm());
            }
        }
        (div, curl)
    }
}

/// With `q = η − kt`, `p = k² + q²`:
/// `P̂x = iqΩ̂/p`, `P̂y = −ikΩ̂/p`, `Q̂x = −ikÂ/p`, `Q̂y = −iqÂ/p`.
pub fn helmholtz_spectra(
    omega: &SpectralField,
    a: &SpectralField,
    t: f64,
) -> Result<VelocitySpectra> {
    omega.check_layout(a)?;
    if omega.shear() != 0.0 {
        return Err(Error::GridMismatch(
            "velocity spectra expect moving-frame fields (shear = 0)".into(),
        ));
    }
    let i = Complex64::new(0.0, 1.0);
    let sym = |k: i32, eta: f64| {
        let kf = k as f64;
        let q = eta - kf * t;
        (kf, q, kf * kf + q * q)
    };
    Ok(VelocitySpectra {
        pvx: omega.map(|k, e, v| {
            let (_, q, p) = sym(k, e);
            i * v * (q / p)
        }),
        pvy: omega.map(|k, e, v| {
            let (kf, _, p) = sym(k, e);
            -i * v * (kf / p)
        }),
        qvx: a.map(|k, e, v| {
            let (kf, _, p) = sym(k, e);
            -i * v * (kf / p)
        }),
        qvy: a.map(|k, e, v| {
            let (_, q, p) = sym(k, e);
            -i * v * (q / p)
        }),
    })
}

/// Relabels a moving-frame field at time `t` by physical frequency
/// `ξ = η − kt`. Amplitudes are untouched; use
/// [`SpectralField::value_at`] to sample at a given `(k, ξ)`.
pub fn to_physical_frequency(f: &SpectralField, t: f64) -> Result<SpectralField> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidHorizon(format!("time must be nonnegative (got {t})")));
    }
    Ok(f.clone().with_shear(f.shear() + t))
}
