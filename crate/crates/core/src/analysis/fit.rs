use serde::Serialize;

use crate::error::{Error, Result};

/// Minimum number of samples a fit window must contain.
pub const MIN_FIT_SAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerFit {
    pub exponent: f64,
    /// `log(C)` of `value ≈ C t^exponent`.
    pub log_prefactor: f64,
    /// RMS of the residuals in `log(value)`.
    pub residual: f64,
    pub window: [f64; 2],
    pub samples: usize,
}

/// Least-squares slope of `log(value)` against `log(t)` over `window`.
pub fn fit_power_law(times: &[f64], values: &[f64], window: [f64; 2]) -> Result<PowerFit> {
    if times.len() != values.len() {
        return Err(Error::Fit(format!(
            "{} times but {} values",
            times.len(),
            values.len()
        )));
    }
    let [lo, hi] = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Fit(format!("window must satisfy 0 < t_lo < t_hi (got [{lo}, {hi}])")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in times.iter().zip(values) {
        if t < lo || t > hi {
            continue;
        }
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Fit(format!("nonpositive value {v} at t = {t}")));
        }
        xs.push(t.ln());
        ys.push(v.ln());
    }
    let n = xs.len();
    if n < MIN_FIT_SAMPLES {
        return Err(Error::Fit(format!(
            "{n} samples in [{lo}, {hi}], need at least {MIN_FIT_SAMPLES}"
        )));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::Fit("all samples at one time".into()));
    }
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - icpt - slope * x).powi(2))
        .sum();
    Ok(PowerFit {
        exponent: slope,
        log_prefactor: icpt,
        residual: (ss / nf).sqrt(),
        window,
        samples: n,
    })
}
