use rayon::prelude::*;
use serde::Serialize;

use super::pipeline::SpectralRun;
use crate::error::{Error, Result};
use crate::fields::{helmholtz_spectra, reconstruct_fields, DeltaField, Invariants};
use crate::spectral::{aniso_norm, ModeKey, SpectralField};
use crate::symbols::{lyap_energy, weight, LyapCoeffs};

/// Column order of `norms.csv`.
pub const CSV_COLUMNS: [&str; 11] = [
    "t",
    "pvx_l2",
    "pvy_l2",
    "qv_l2",
    "rho_l2_scaled",
    "theta_l2_scaled",
    "lyap_ratio_min",
    "lyap_ratio_max",
    "beta_drift",
    "gamma_drift",
    "sigma_drift",
];

/// Time series of the quantities bounded by the main estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormSeries {
    pub times: Vec<f64>,
    pub pvx: Vec<f64>,
    pub pvy: Vec<f64>,
    pub qv: Vec<f64>,
    /// `(γ/M)‖ρ‖`.
    pub rho_scaled: Vec<f64>,
    /// `(γ/M)‖θ‖`.
    pub theta_scaled: Vec<f64>,
    /// Extremes over modes of `E(t)/E(0)`.
    pub lyap_min: Vec<f64>,
    pub lyap_max: Vec<f64>,
    pub beta_drift: Vec<f64>,
    pub gamma_drift: Vec<f64>,
    pub sigma_drift: Vec<f64>,
    /// `(1/M)‖(γ−1)ρ − θ‖`.
    pub sigma_l2: Vec<f64>,
    /// Largest relative defect of `(γ/M)²‖ρ‖² = ‖x₁ + y₁‖²`.
    pub separation_defect: f64,
    /// Largest structure defect of the Helmholtz spectra (divergence of
    /// `P̂`, curl of `Q̂`), relative to the field magnitude.
    pub helmholtz_defect: f64,
}

struct Sample {
    pvx: f64,
    pvy: f64,
    qv: f64,
    rho: f64,
    theta: f64,
    lyap: [f64; 2],
    drift: [f64; 3],
    sigma: f64,
    separation: f64,
    helmholtz: f64,
}

impl NormSeries {
    pub fn zeros(times: &[f64]) -> Self {
        let z = vec![0.0; times.len()];
        NormSeries {
            times: times.to_vec(),
            pvx: z.clone(),
            pvy: z.clone(),
            qv: z.clone(),
            rho_scaled: z.clone(),
            theta_scaled: z.clone(),
            lyap_min: z.clone(),
            lyap_max: z.clone(),
            beta_drift: z.clone(),
            gamma_drift: z.clone(),
            sigma_drift: z.clone(),
            sigma_l2: z,
            separation_defect: 0.0,
            helmholtz_defect: 0.0,
        }
    }

    /// Evaluates every sample of `run`, rebuilding `(R̂, Θ̂, Ω̂)` from `δ̂` and
    /// the invariants.
    pub fn from_run(run: &SpectralRun, inv: &Invariants) -> Result<Self> {
        let params = run.plan.params;
        let (g, m) = (params.gamma, params.mach);
        let samples: Vec<Sample> = (0..run.n_samples())
            .into_par_iter()
            .map(|n| {
                let t = run.times[n];
                let full = run.fields(n)?;
                let delta = DeltaField {
                    delta: SpectralField::linear_combination(&[(1.0 / g, &full.r), (1.0 / g, &full.theta)])?,
                };
                let rec = reconstruct_fields(&delta, inv, params)?;
                let vel = helmholtz_spectra(&rec.omega, &full.a, t)?;
                let (div, curl) = vel.structure_defects(t);
                let scale = full.a.amplitudes().iter().chain(rec.omega.amplitudes())
                    .fold(0.0f64, |acc, v| acc.max(v.norm()));
                let qx = aniso_norm(&vel.qvx, 0.0, 0.0);
                let qy = aniso_norm(&vel.qvy, 0.0, 0.0);
                let rho = aniso_norm(&rec.r, 0.0, 0.0);
                let sigma = SpectralField::linear_combination(&[((g - 1.0) / m, &rec.r), (-1.0 / m, &rec.theta)])?;
                let x1y1 = SpectralField::linear_combination(&[
                    ((g - 1.0) / m, &rec.r),
                    (-1.0 / m, &rec.theta),
                    (1.0 / m, &rec.r),
                    (1.0 / m, &rec.theta),
                ])?;
                let lhs = (g / m * rho).powi(2);
                let rhs = aniso_norm(&x1y1, 0.0, 0.0).powi(2);
                Ok(Sample {
                    pvx: aniso_norm(&vel.pvx, 0.0, 0.0),
                    pvy: aniso_norm(&vel.pvy, 0.0, 0.0),
                    qv: (qx * qx + qy * qy).sqrt(),
                    rho: g / m * rho,
                    theta: g / m * aniso_norm(&rec.theta, 0.0, 0.0),
                    lyap: lyap_extremes(run, &delta.delta, &full.a, n),
                    drift: run.invariant_drift(n),
                    sigma: aniso_norm(&sigma, 0.0, 0.0),
                    separation: if lhs > 0.0 { (lhs - rhs).abs() / lhs } else { rhs },
                    helmholtz: if scale > 0.0 { div.max(curl) / scale } else { 0.0 },
                })
            })
            .collect::<Result<_>>()?;

        let mut s = NormSeries::zeros(&run.times);
        for (n, x) in samples.into_iter().enumerate() {
            s.pvx[n] = x.pvx;
            s.pvy[n] = x.pvy;
            s.qv[n] = x.qv;
            s.rho_scaled[n] = x.rho;
            s.theta_scaled[n] = x.theta;
            s.lyap_min[n] = x.lyap[0];
            s.lyap_max[n] = x.lyap[1];
            s.beta_drift[n] = x.drift[0];
            s.gamma_drift[n] = x.drift[1];
            s.sigma_drift[n] = x.drift[2];
            s.sigma_l2[n] = x.sigma;
            s.separation_defect = s.separation_defect.max(x.separation);
            s.helmholtz_defect = s.helmholtz_defect.max(x.helmholtz);
        }
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidHorizon("series times must increase".into()));
        }
        for col in self.columns().iter().skip(1) {
            if col.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::InvalidHorizon("series values must be finite and nonnegative".into()));
            }
        }
        Ok(())
    }

    /// `‖Q[v]‖ + (γ/M)‖ρ‖ + (γ/M)‖θ‖`.
    pub fn compressible(&self) -> Vec<f64> {
        (0..self.times.len())
            .map(|n| self.qv[n] + self.rho_scaled[n] + self.theta_scaled[n])
            .collect()
    }

    fn columns(&self) -> [&Vec<f64>; 11] {
        [
            &self.times,
            &self.pvx,
            &self.pvy,
            &self.qv,
            &self.rho_scaled,
            &self.theta_scaled,
            &self.lyap_min,
            &self.lyap_max,
            &self.beta_drift,
            &self.gamma_drift,
            &self.sigma_drift,
        ]
    }

    pub fn to_csv(&self) -> String {
        let mut out = CSV_COLUMNS.join(",");
        out.push('\n');
        let cols = self.columns();
        for n in 0..self.times.len() {
            let row: Vec<String> = cols.iter().map(|c| format!("{:.12e}", c[n])).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Parses the output of [`NormSeries::to_csv`]. Fields not stored in the
    /// file are left at zero.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Config("empty CSV".into()))?;
        if header.split(',').ne(CSV_COLUMNS.iter().copied()) {
            return Err(Error::Config(format!("unexpected CSV header: {header}")));
        }
        let mut rows: Vec<[f64; 11]> = Vec::new();
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let vals: Vec<f64> = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Config(format!("CSV row {}: {e}", i + 2)))?;
            let row: [f64; 11] = vals
                .try_into()
                .map_err(|_| Error::Config(format!("CSV row {} has the wrong width", i + 2)))?;
            rows.push(row);
        }
        let col = |c: usize| rows.iter().map(|r| r[c]).collect::<Vec<f64>>();
        let mut s = NormSeries::zeros(&col(0));
        s.pvx = col(1);
        s.pvy = col(2);
        s.qv = col(3);
        s.rho_scaled = col(4);
        s.theta_scaled = col(5);
        s.lyap_min = col(6);
        s.lyap_max = col(7);
        s.beta_drift = col(8);
        s.gamma_drift = col(9);
        s.sigma_drift = col(10);
        s.validate()?;
        Ok(s)
    }
}

/// `min` and `max` over `k > 0` modes with `E(0) > 0` of `E(t)/E(0)`.
fn lyap_extremes(run: &SpectralRun, delta: &SpectralField, a: &SpectralField, n: usize) -> [f64; 2] {
    let params = run.plan.params;
    let conv = run.plan.convention;
    let g = params.gamma;
    let t = run.times[n];
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (row, &k) in run.ks.iter().enumerate() {
        let ki = delta.k_index(k).expect("row");
        for j in 0..run.grid.len() {
            let s0 = run.state(row, j, 0);
            let d0 = (s0[0] + s0[3]) / g;
            let key = ModeKey::new(k, run.grid.point(j)).expect("nonzero k");
            let e0 = lyap_energy(&weight(d0, s0[1], 0.0, key, params), &LyapCoeffs::at(0.0, key, params, conv));
            if !(e0 > 0.0) {
                continue;
            }
            let z = weight(delta.get(ki, j), a.get(ki, j), t, key, params);
            let r = lyap_energy(&z, &LyapCoeffs::at(t, key, params, conv)) / e0;
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    if hi == 0.0 && lo == f64::INFINITY {
        [0.0, 0.0]
    } else {
        [lo, hi]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut s = NormSeries::zeros(&[0.0, 0.5, 1.0]);
        s.pvx = vec![1.0, 0.5, 1.0 / 3.0];
        s.sigma_drift = vec![0.0, 1e-17, 2e-16];
        let text = s.to_csv();
        assert!(text.starts_with("t,pvx_l2,pvy_l2,qv_l2,rho_l2_scaled,theta_l2_scaled,lyap_ratio_min,lyap_ratio_max,beta_drift,gamma_drift,sigma_drift\n"));
        let back = NormSeries::from_csv(&text).unwrap();
        assert_eq!(back.times, s.times);
        for (a, b) in back.pvx.iter().zip(&s.pvx) {
            assert!((a - b).abs() < 1e-12 * b.abs().max(1e-300));
        }
        assert!(NormSeries::from_csv("t,x\n1,2\n").is_err());
    }

    #[test]
    fn validation_rejects_bad_series() {
        let mut s = NormSeries::zeros(&[0.0, 1.0]);
        s.qv[0] = -1.0;
        assert!(s.validate().is_err());
        let s = NormSeries::zeros(&[1.0, 1.0]);
        assert!(s.validate().is_err());
    }
}
