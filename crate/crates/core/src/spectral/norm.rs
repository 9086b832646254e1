use super::SpectralField;

/// Japanese bracket `⟨a⟩ = (1 + a²)^{1/2}`.
pub fn japanese(a: f64) -> f64 {
    (1.0 + a * a).sqrt()
}

/// Weight selecting between the anisotropic `H^{s_x}_x H^{s_y}_y` norm and
/// the isotropic `H^s` norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SobolevWeight {
    Aniso { s_x: f64, s_y: f64 },
    Iso { s: f64 },
}

impl SobolevWeight {
    /// Squared weight `⟨k⟩^{2s_x}⟨η⟩^{2s_y}` or `⟨k, η⟩^{2s}`.
    pub fn squared(&self, k: f64, eta: f64) -> f64 {
        match *self {
            SobolevWeight::Aniso { s_x, s_y } => {
                let wx = if s_x == 0.0 { 1.0 } else { (1.0 + k * k).powf(s_x) };
                let wy = if s_y == 0.0 { 1.0 } else { (1.0 + eta * eta).powf(s_y) };
                wx * wy
            }
            SobolevWeight::Iso { s } => {
                if s == 0.0 {
                    1.0
                } else {
                    (1.0 + k * k + eta * eta).powf(s)
                }
            }
        }
    }
}

/// `(Σ_k ∫ w(k, η) |f̂|² dη)^{1/2}` by the trapezoid rule on the field's grid.
/// Frequencies are the field's own labels, so a moving-frame field must be
/// relabelled with [`crate::fields::to_physical_frequency`] before taking a
/// norm with nonzero `s_y`.
pub fn sobolev_norm(f: &SpectralField, weight: SobolevWeight) -> f64 {
    let grid = f.grid();
    let mut acc = 0.0;
    for (ki, &k) in f.ks().iter().enumerate() {
        let kf = k as f64;
        for (j, a) in f.row(ki).iter().enumerate() {
            let m = a.norm_sqr();
            if m == 0.0 {
                continue;
            }
            acc += grid.weight(j) * weight.squared(kf, f.frequency(ki, j)) * m;
        }
    }
    acc.sqrt()
}

/// Anisotropic norm `‖f‖_{H^{s1}_x H^{s2}_y}`.
pub fn aniso_norm(f: &SpectralField, s1: f64, s2: f64) -> f64 {
    sobolev_norm(f, SobolevWeight::Aniso { s_x: s1, s_y: s2 })
}

/// Isotropic norm `‖f‖_{H^s}`.
pub fn iso_norm(f: &SpectralField, s: f64) -> f64 {
    sobolev_norm(f, SobolevWeight::Iso { s })
}
