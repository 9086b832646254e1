//! The `k = 0` part of the perturbation: a 1D acoustic system in `y`,
//! solved by the method of lines on `[−L, L]` with Dirichlet ends.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{PhysParams, YGrid};

/// Largest magnitude tolerated next to either boundary.
pub const BOUNDARY_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroModeState {
    pub grid: YGrid,
    pub rho0: Vec<f64>,
    pub alpha0: Vec<f64>,
    pub omega0: Vec<f64>,
    pub theta0: Vec<f64>,
}

impl ZeroModeState {
    pub fn zeros(grid: YGrid) -> Self {
        let z = vec![0.0; grid.len()];
        ZeroModeState {
            grid,
            rho0: z.clone(),
            alpha0: z.clone(),
            omega0: z.clone(),
            theta0: z,
        }
    }

    /// Samples `f(y) = [ρ₀, α₀, ω₀, θ₀]` on the grid.
    pub fn from_fn(grid: YGrid, f: impl Fn(f64) -> [f64; 4]) -> Self {
        let mut s = ZeroModeState::zeros(grid);
        for (j, y) in grid.points().into_iter().enumerate() {
            let v = f(y);
            s.rho0[j] = v[0];
            s.alpha0[j] = v[1];
            s.omega0[j] = v[2];
            s.theta0[j] = v[3];
        }
        s
    }

    fn profiles(&self) -> [&Vec<f64>; 4] {
        [&self.rho0, &self.alpha0, &self.omega0, &self.theta0]
    }

    pub fn validate(&self) -> Result<()> {
        for p in self.profiles() {
            if p.len() != self.grid.len() {
                return Err(Error::GridMismatch(format!(
                    "profile has {} samples, grid has {}",
                    p.len(),
                    self.grid.len()
                )));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInitialData("non-finite profile value".into()));
            }
        }
        Ok(())
    }

    /// `ρ₀ + θ₀`.
    pub fn sum_rho_theta(&self) -> Vec<f64> {
        self.rho0.iter().zip(&self.theta0).map(|(r, t)| r + t).collect()
    }

    /// Largest magnitude over the two outermost points at each end.
    pub fn boundary_magnitude(&self) -> f64 {
        let n = self.grid.len();
        self.profiles()
            .iter()
            .flat_map(|p| [p[0], p[1], p[n - 2], p[n - 1]])
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    fn check_boundary(&self) -> Result<()> {
        let b = self.boundary_magnitude();
        if b > BOUNDARY_LIMIT {
            return Err(Error::BoundaryContamination {
                value: b,
                limit: BOUNDARY_LIMIT,
            });
        }
        Ok(())
    }

    fn axpy(&self, h: f64, d: &ZeroModeState) -> ZeroModeState {
        let f = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + h * y).collect();
        ZeroModeState {
            grid: self.grid,
            rho0: f(&self.rho0, &d.rho0),
            alpha0: f(&self.alpha0, &d.alpha0),
            omega0: f(&self.omega0, &d.omega0),
            theta0: f(&self.theta0, &d.theta0),
        }
    }
}

/// Second-order centred `∂_yy` with zero values beyond the ends.
fn laplacian(u: &[f64], h: f64) -> Vec<f64> {
    let n = u.len();
    let mut out = vec![0.0; n];
    let inv = 1.0 / (h * h);
    for j in 1..n - 1 {
        out[j] = (u[j + 1] - 2.0 * u[j] + u[j - 1]) * inv;
    }
    out
}

fn rhs(s: &ZeroModeState, params: PhysParams) -> ZeroModeState {
    let n = s.grid.len();
    let g = params.gamma;
    let coef = -1.0 / (g * params.mach * params.mach);
    let lap = laplacian(&s.sum_rho_theta(), s.grid.spacing());
    let mut d = ZeroModeState::zeros(s.grid);
    for j in 1..n - 1 {
        let a = s.alpha0[j];
        d.rho0[j] = -a;
        d.alpha0[j] = coef * lap[j];
        d.omega0[j] = a;
        d.theta0[j] = -(g - 1.0) * a;
    }
    d
}

fn rk4_step(s: &ZeroModeState, params: PhysParams, dt: f64) -> ZeroModeState {
    let k1 = rhs(s, params);
    let k2 = rhs(&s.axpy(0.5 * dt, &k1), params);
    let k3 = rhs(&s.axpy(0.5 * dt, &k2), params);
    let k4 = rhs(&s.axpy(dt, &k3), params);
    let mut out = s.axpy(dt / 6.0, &k1);
    out = out.axpy(dt / 3.0, &k2);
    out = out.axpy(dt / 3.0, &k3);
    out.axpy(dt / 6.0, &k4)
}

/// Evolves to `t_end` with RK4. `dt` is an upper bound; the step actually
/// used divides `t_end` evenly.
pub fn evolve_zero_mode(
    s0: &ZeroModeState,
    params: PhysParams,
    t_end: f64,
    dt: f64,
) -> Result<ZeroModeState> {
    Ok(evolve_zero_mode_sampled(s0, params, t_end, dt, t_end)?
        .pop()
        .expect("at least the final sample")
        .1)
}

/// As [`evolve_zero_mode`], returning the state at `t = 0` and at every
/// multiple of `sample_dt` up to `t_end`.
pub fn evolve_zero_mode_sampled(
    s0: &ZeroModeState,
    params: PhysParams,
    t_end: f64,
    dt: f64,
    sample_dt: f64,
) -> Result<Vec<(f64, ZeroModeState)>> {
    s0.validate()?;
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::InvalidHorizon(format!("t_end must be nonnegative (got {t_end})")));
    }
    if !(sample_dt.is_finite() && sample_dt > 0.0) {
        return Err(Error::InvalidHorizon(format!("sample interval must be positive (got {sample_dt})")));
    }
    let h = s0.grid.spacing();
    let limit = 0.5 * params.mach * h;
    if !(dt > 0.0 && dt <= limit * (1.0 + 1e-12)) {
        return Err(Error::Cfl(format!("dt = {dt} exceeds 0.5·M·h = {limit}")));
    }
    s0.check_boundary()?;

    let mut out = vec![(0.0, s0.clone())];
    if t_end == 0.0 {
        return Ok(out);
    }
    let steps = (t_end / dt).ceil().max(1.0) as u64;
    let dt = t_end / steps as f64;
    let every = ((sample_dt / dt).round() as u64).max(1);
    let mut s = s0.clone();
    for i in 1..=steps {
        s = rk4_step(&s, params, dt);
        s.check_boundary()?;
        if i % every == 0 || i == steps {
            out.push((i as f64 * dt, s.clone()));
        }
    }
    Ok(out)
}

/// Cubic Lagrange interpolation of grid values at `y`.
pub fn interpolate(values: &[f64], grid: YGrid, y: f64) -> Result<f64> {
    let l = grid.half_width();
    if !(y >= -l && y <= l) {
        return Err(Error::InvalidGrid(format!("evaluation point {y} outside [−{l}, {l}]")));
    }
    let h = grid.spacing();
    let n = grid.len();
    let x = (y + l) / h;
    let i = (x.floor() as usize).clamp(1, n - 3);
    let s = x - i as f64;
    let w = [
        -s * (s - 1.0) * (s - 2.0) / 6.0,
        (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
        -(s + 1.0) * s * (s - 2.0) / 2.0,
        (s + 1.0) * s * (s - 1.0) / 6.0,
    ];
    Ok((0..4).map(|m| w[m] * values[i - 1 + m]).sum())
}

/// `G(y_j) = ∫_{−L}^{y_j} g` with the four-point rule on each cell.
pub fn cumulative_integral(g: &[f64], grid: YGrid) -> Vec<f64> {
    let n = g.len();
    let h = grid.spacing();
    let mut out = vec![0.0; n];
    for j in 0..n - 1 {
        let cell = if j == 0 || j + 2 >= n {
            0.5 * h * (g[j] + g[j + 1])
        } else {
            h / 24.0 * (-g[j - 1] + 13.0 * g[j] + 13.0 * g[j + 1] - g[j + 2])
        };
        out[j + 1] = out[j] + cell;
    }
    out
}

/// Values of a d'Alembert solution on the grid points `first..first+len`,
/// the points whose characteristic feet stay inside `[−L, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DalembertProfile {
    pub first: usize,
    pub values: Vec<f64>,
}

impl DalembertProfile {
    /// Largest `|values − other[first..]|`.
    pub fn max_error(&self, other: &[f64]) -> f64 {
        self.values
            .iter()
            .zip(&other[self.first..])
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// `½[u(y−ct) + u(y+ct)] + (1/2c)∫_{y−ct}^{y+ct} g`.
pub fn dalembert(u: &[f64], g: &[f64], grid: YGrid, c: f64, t: f64) -> Result<DalembertProfile> {
    if u.len() != grid.len() || g.len() != grid.len() {
        return Err(Error::GridMismatch("profile length differs from grid".into()));
    }
    if !(t.is_finite() && t >= 0.0 && c > 0.0) {
        return Err(Error::InvalidHorizon(format!("need t ≥ 0 and c > 0 (got t = {t}, c = {c})")));
    }
    let l = grid.half_width();
    let reach = c * t;
    let pts = grid.points();
    let inside: Vec<usize> = (0..pts.len())
        .filter(|&j| pts[j].abs() + reach <= l * (1.0 + 1e-14))
        .collect();
    let (Some(&first), Some(&last)) = (inside.first(), inside.last()) else {
        return Err(Error::InvalidGrid(format!(
            "cone of radius {reach} covers the whole domain [−{l}, {l}]"
        )));
    };
    let big_g = cumulative_integral(g, grid);
    let clamp = |y: f64| y.clamp(-l, l);
    let mut values = Vec::with_capacity(last - first + 1);
    for &y in &pts[first..=last] {
        if t == 0.0 {
            values.push(u[first + values.len()]);
            continue;
        }
        let lo = clamp(y - reach);
        let hi = clamp(y + reach);
        let wave = 0.5 * (interpolate(u, grid, lo)? + interpolate(u, grid, hi)?);
        let src = (interpolate(&big_g, grid, hi)? - interpolate(&big_g, grid, lo)?) / (2.0 * c);
        values.push(wave + src);
    }
    Ok(DalembertProfile { first, values })
}

/// Closed-form `(ρ₀ + θ₀)(t, ·)` from the initial state: data `ρ₀ + θ₀`,
/// initial velocity `−γα₀`, speed `1/M`.
pub fn dalembert_reference(s0: &ZeroModeState, params: PhysParams, t: f64) -> Result<DalembertProfile> {
    s0.validate()?;
    let g: Vec<f64> = s0.alpha0.iter().map(|a| -params.gamma * a).collect();
    dalembert(&s0.sum_rho_theta(), &g, s0.grid, params.sound_speed(), t)
}

/// `ω₀(t) = ω₀ⁱⁿ + ρ₀ⁱⁿ − ρ₀(t)`, `θ₀(t) = θ₀ⁱⁿ + (γ−1)(ρ₀(t) − ρ₀ⁱⁿ)`.
pub fn recover_zero_fields(
    rho_t: &[f64],
    s0: &ZeroModeState,
    params: PhysParams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if rho_t.len() != s0.grid.len() {
        return Err(Error::GridMismatch("ρ₀ profile length differs from grid".into()));
    }
    let g1 = params.gamma - 1.0;
    let omega = (0..rho_t.len())
        .map(|j| s0.omega0[j] + s0.rho0[j] - rho_t[j])
        .collect();
    let theta = (0..rho_t.len())
        .map(|j| s0.theta0[j] + g1 * (rho_t[j] - s0.rho0[j]))
        .collect();
    Ok((omega, theta))
}

/// Discrete energy `Σ h[(γα₀)² + c²(D₊s)²]` of `s = ρ₀ + θ₀`, exactly
/// conserved by the semi-discrete system.
pub fn wave_energy(s: &ZeroModeState, params: PhysParams) -> f64 {
    let h = s.grid.spacing();
    let c2 = 1.0 / (params.mach * params.mach);
    let sum = s.sum_rho_theta();
    let kinetic: f64 = s.alpha0.iter().map(|a| (params.gamma * a).powi(2)).sum();
    let strain: f64 = sum.windows(2).map(|w| ((w[1] - w[0]) / h).powi(2)).sum();
    h * (kinetic + c2 * strain)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: f64) -> PhysParams {
        PhysParams::new(1.4, m).unwrap()
    }

    #[test]
    fn zero_state_stays_zero() {
        let grid = YGrid::new(10.0, 201).unwrap();
        let s0 = ZeroModeState::zeros(grid);
        let s = evolve_zero_mode(&s0, params(1.0), 1.0, 0.02).unwrap();
        assert_eq!(s, s0);
    }

    #[test]
    fn cfl_is_enforced() {
        let grid = YGrid::new(10.0, 201).unwrap();
        let s0 = ZeroModeState::zeros(grid);
        // h = 0.1, M = 1: limit 0.05.
        assert!(matches!(evolve_zero_mode(&s0, params(1.0), 1.0, 0.06), Err(Error::Cfl(_))));
        assert!(evolve_zero_mode(&s0, params(1.0), 1.0, 0.05).is_ok());
    }

    #[test]
    fn boundary_contamination_is_detected() {
        let grid = YGrid::new(6.0, 241).unwrap();
        let s0 = ZeroModeState::from_fn(grid, |y| [(-y * y / 2.0).exp(), 0.0, 0.0, 0.0]);
        let err = evolve_zero_mode(&s0, params(1.0), 5.0, 0.02).unwrap_err();
        assert!(matches!(err, Error::BoundaryContamination { .. }));
    }

    #[test]
    fn plateau_evolves_linearly() {
        // Flat top on |y| < 20 with smooth shoulders; inside the plateau the
        // Laplacian vanishes until the shoulder signal arrives.
        let plateau = |y: f64| {
            let s = |z: f64| 0.5 * (1.0 + z.tanh());
            s(y + 20.0) * s(20.0 - y)
        };
        let grid = YGrid::new(40.0, 801).unwrap();
        let s0 = ZeroModeState::from_fn(grid, |y| {
            let p = plateau(y);
            [2.0 * p, 0.3 * p, 0.0, -p]
        });
        let p = params(1.0);
        let t = 1.0;
        let s = evolve_zero_mode(&s0, p, t, 0.05).unwrap();
        let mid = grid.len() / 2;
        assert!((s.rho0[mid] - (2.0 - 0.3 * t)).abs() < 1e-10);
        assert!((s.theta0[mid] - (-1.0 - 0.4 * 0.3 * t)).abs() < 1e-10);
        assert!((s.alpha0[mid] - 0.3).abs() < 1e-10);
    }

    #[test]
    fn interpolation_is_exact_on_cubics() {
        let grid = YGrid::new(2.0, 21).unwrap();
        let f = |y: f64| 1.0 - 2.0 * y + 0.5 * y * y - 0.25 * y * y * y;
        let v: Vec<f64> = grid.points().into_iter().map(f).collect();
        for y in [-2.0, -1.97, -0.33, 0.0, 1.234, 1.99, 2.0] {
            assert!((interpolate(&v, grid, y).unwrap() - f(y)).abs() < 1e-12);
        }
        assert!(interpolate(&v, grid, 2.1).is_err());
    }

    #[test]
    fn cumulative_integral_is_fourth_order() {
        let err = |n: usize| {
            let grid = YGrid::new(8.0, n).unwrap();
            let g: Vec<f64> = grid.points().into_iter().map(|y| (-y * y).exp()).collect();
            let big = cumulative_integral(&g, grid);
            (big[n - 1] - std::f64::consts::PI.sqrt()).abs()
                .max((big[(n - 1) / 2] - 0.5 * std::f64::consts::PI.sqrt()).abs())
        };
        let (e1, e2) = (err(81), err(161));
        assert!(e2 < 1e-6);
        assert!(e1 / e2 > 12.0 || e2 < 1e-12, "{e1} {e2}");
    }

    #[test]
    fn dalembert_examples() {
        let grid = YGrid::new(12.0, 2401).unwrap();
        let s0 = ZeroModeState::from_fn(grid, |y| [(-y * y).exp(), 0.0, 0.0, 0.0]);
        let p = params(1.0);
        let at0 = dalembert_reference(&s0, p, 0.0).unwrap();
        assert_eq!(at0.first, 0);
        assert_eq!(at0.values, s0.sum_rho_theta());

        let at3 = dalembert_reference(&s0, p, 3.0).unwrap();
        for (i, v) in at3.values.iter().enumerate() {
            let y = grid.point(at3.first + i);
            let exact = 0.5 * ((-(y - 3.0).powi(2)).exp() + (-(y + 3.0).powi(2)).exp());
            assert!((v - exact).abs() < 1e-9);
        }
        assert!(dalembert_reference(&s0, p, 13.0).is_err());
    }

    #[test]
    fn dalembert_source_term() {
        // u = 0, g = 2y e^{−y²}: solution (e^{−(y−ct)²} − e^{−(y+ct)²})/(2c).
        let grid = YGrid::new(12.0, 2401).unwrap();
        let u = vec![0.0; grid.len()];
        let g: Vec<f64> = grid.points().into_iter().map(|y| 2.0 * y * (-y * y).exp()).collect();
        let (c, t) = (2.0, 1.5);
        let prof = dalembert(&u, &g, grid, c, t).unwrap();
        for (i, v) in prof.values.iter().enumerate() {
            let y = grid.point(prof.first + i);
            let exact = ((-(y - c * t).powi(2)).exp() - (-(y + c * t).powi(2)).exp()) / (2.0 * c);
            assert!((v - exact).abs() < 1e-8, "{y}: {v} vs {exact}");
        }
    }

    #[test]
    fn recovery_examples() {
        let grid = YGrid::new(5.0, 51).unwrap();
        let s0 = ZeroModeState::from_fn(grid, |y| [y.cos(), 0.0, y.sin(), 0.5]);
        let (om, th) = recover_zero_fields(&s0.rho0, &s0, params(1.0)).unwrap();
        for j in 0..grid.len() {
            assert!((om[j] - s0.omega0[j]).abs() < 1e-15);
            assert_eq!(th[j], s0.theta0[j]);
        }

        let p1 = PhysParams { gamma: 1.0, mach: 1.0 };
        let shifted: Vec<f64> = s0.rho0.iter().map(|r| r + 3.0).collect();
        let (_, th) = recover_zero_fields(&shifted, &s0, p1).unwrap();
        assert_eq!(th, s0.theta0);
        assert!(recover_zero_fields(&shifted[1..], &s0, p1).is_err());
    }

    #[test]
    fn pulses_split_and_travel() {
        let p = params(1.0);
        let grid = YGrid::new(16.0, 1601).unwrap();
        let s0 = ZeroModeState::from_fn(grid, |y| [(-y * y / 2.0).exp(), 0.0, 0.0, 0.0]);
        let s = evolve_zero_mode(&s0, p, 4.0, 0.005).unwrap();
        let sum = s.sum_rho_theta();
        let j = |y: f64| ((y + 16.0) / grid.spacing()).round() as usize;
        assert!((sum[j(4.0)] - 0.5).abs() < 1e-3);
        assert!((sum[j(-4.0)] - 0.5).abs() < 1e-3);
        assert!(sum[j(0.0)].abs() < 1e-3);
    }
}
