//! Finite-difference solver of the original-coordinate system at one
//! x-wavenumber, used to cross-check the spectral solution.
//!
//! Profiles `f_k(y)` on `[−L, L]` (Dirichlet ends) evolve under
//!
//! ```text
//! ∂_t ρ = −iky ρ − α
//! ∂_t α = −iky α − 2ik(∂_y ψ_α + ik ψ_ω) − (1/(γM²))(∂_yy − k²)(ρ + θ)
//! ∂_t ω = −iky ω + α
//! ∂_t θ = −iky θ − (γ−1) α
//! ```
//!
//! with `(∂_yy − k²)ψ_f = f`. Derivatives are second-order centred
//! differences; time stepping is classical RK4.
//!
//! This module only depends on [`crate::spectral`]: none of the sheared
//! frame machinery of the spectral path is used here.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::{InitialDataSpec, PhysParams, SpectralField, YGrid};

/// Largest profile magnitude tolerated next to either boundary.
pub const FD_BOUNDARY_LIMIT: f64 = 1e-10;

/// Largest admissible `|k|·L·dt`.
pub const PHASE_LIMIT: f64 = 0.5;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Solves `a_j x_{j−1} + b_j x_j + c_j x_{j+1} = d_j` (`a_0`, `c_{n−1}` unused).
pub fn thomas_solve(
    sub: &[Complex64],
    diag: &[Complex64],
    sup: &[Complex64],
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = diag.len();
    if sub.len() != n || sup.len() != n || rhs.len() != n {
        return Err(Error::GridMismatch("tridiagonal bands differ in length".into()));
    }
    let mut c = vec![ZERO; n];
    let mut d = vec![ZERO; n];
    let mut pivot = diag[0];
    for j in 0..n {
        if j > 0 {
            pivot = diag[j] - sub[j] * c[j - 1];
        }
        if pivot.norm() == 0.0 || !pivot.is_finite() {
            return Err(Error::Singular(format!("zero pivot in row {j}")));
        }
        c[j] = sup[j] / pivot;
        d[j] = if j == 0 { rhs[0] / pivot } else { (rhs[j] - sub[j] * d[j - 1]) / pivot };
    }
    let mut x = d;
    for j in (0..n - 1).rev() {
        let next = x[j + 1];
        x[j] -= c[j] * next;
    }
    Ok(x)
}

/// `(D² − k²)u` with `u = 0` at and beyond the ends; zero at the end points.
fn helmholtz_apply(u: &[Complex64], k: f64, h: f64) -> Vec<Complex64> {
    let n = u.len();
    let inv = 1.0 / (h * h);
    let mut out = vec![ZERO; n];
    for j in 1..n - 1 {
        out[j] = (u[j + 1] - u[j] * 2.0 + u[j - 1]) * inv - u[j] * (k * k);
    }
    out
}

/// Solves `(∂_yy − k²)ψ = rhs` with `ψ(±L) = 0`.
pub fn helmholtz_solve_fd(rhs: &[Complex64], k: i32, grid: YGrid) -> Result<Vec<Complex64>> {
    if k == 0 {
        return Err(Error::ZeroWavenumber);
    }
    let n = grid.len();
    if rhs.len() != n {
        return Err(Error::GridMismatch(format!(
            "right-hand side has {} samples, grid has {n}",
            rhs.len()
        )));
    }
    let h = grid.spacing();
    let kf = k as f64;
    let m = n - 2;
    let off = Complex64::new(1.0 / (h * h), 0.0);
    let main = Complex64::new(-2.0 / (h * h) - kf * kf, 0.0);
    let inner = thomas_solve(&vec![off; m], &vec![main; m], &vec![off; m], &rhs[1..n - 1])?;

    let mut psi = vec![ZERO; n];
    psi[1..n - 1].copy_from_slice(&inner);

    let applied = helmholtz_apply(&psi, kf, h);
    let (mut res, mut scale_psi, mut scale_rhs): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for j in 1..n - 1 {
        res = res.max((applied[j] - rhs[j]).norm());
        scale_psi = scale_psi.max(psi[j].norm());
        scale_rhs = scale_rhs.max(rhs[j].norm());
    }
    let op_norm = 4.0 / (h * h) + kf * kf;
    let scale = op_norm * scale_psi + scale_rhs;
    if scale > 0.0 && res > 1e-12 * scale {
        return Err(Error::Singular(format!("residual {res:e} relative to {scale:e}")));
    }
    Ok(psi)
}

/// Complex profiles of `(ρ, α, ω, θ)` at wavenumber `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FdState {
    pub k: i32,
    pub grid: YGrid,
    pub rho: Vec<Complex64>,
    pub alpha: Vec<Complex64>,
    pub omega: Vec<Complex64>,
    pub theta: Vec<Complex64>,
}

impl FdState {
    pub fn zeros(k: i32, grid: YGrid) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroWavenumber);
        }
        let z = vec![ZERO; grid.len()];
        Ok(FdState {
            k,
            grid,
            rho: z.clone(),
            alpha: z.clone(),
            omega: z.clone(),
            theta: z,
        })
    }

    /// Samples the x-Fourier profiles of packet initial data.
    pub fn from_initial(spec: &InitialDataSpec, k: i32, grid: YGrid) -> Result<Self> {
        spec.validate()?;
        let mut s = FdState::zeros(k, grid)?;
        for (j, y) in grid.points().into_iter().enumerate() {
            s.rho[j] = spec.rho.y_profile(k, y);
            s.alpha[j] = spec.alpha.y_profile(k, y);
            s.omega[j] = spec.omega.y_profile(k, y);
            s.theta[j] = spec.theta.y_profile(k, y);
        }
        Ok(s)
    }

    /// Profiles in the order `(ρ, α, ω, θ)`.
    pub fn profiles(&self) -> [&Vec<Complex64>; 4] {
        [&self.rho, &self.alpha, &self.omega, &self.theta]
    }

    pub fn boundary_magnitude(&self) -> f64 {
        let n = self.grid.len();
        self.profiles()
            .iter()
            .flat_map(|p| [p[0], p[1], p[n - 2], p[n - 1]])
            .fold(0.0, |m, v| m.max(v.norm()))
    }

    fn check_boundary(&self) -> Result<()> {
        let b = self.boundary_magnitude();
        if b > FD_BOUNDARY_LIMIT {
            return Err(Error::BoundaryContamination {
                value: b,
                limit: FD_BOUNDARY_LIMIT,
            });
        }
        Ok(())
    }

    fn axpy(&self, h: f64, d: &FdState) -> FdState {
        let f = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| x + y * h).collect();
        FdState {
            k: self.k,
            grid: self.grid,
            rho: f(&self.rho, &d.rho),
            alpha: f(&self.alpha, &d.alpha),
            omega: f(&self.omega, &d.omega),
            theta: f(&self.theta, &d.theta),
        }
    }
}

fn rhs(s: &FdState, params: PhysParams) -> Result<FdState> {
    let n = s.grid.len();
    let h = s.grid.spacing();
    let kf = s.k as f64;
    let g = params.gamma;
    let acoustic = 1.0 / (g * params.mach * params.mach);
    let i = Complex64::new(0.0, 1.0);

    let psi_a = helmholtz_solve_fd(&s.alpha, s.k, s.grid)?;
    let psi_w = helmholtz_solve_fd(&s.omega, s.k, s.grid)?;
    let sum: Vec<Complex64> = s.rho.iter().zip(&s.theta).map(|(r, t)| r + t).collect();
    let lap_sum = helmholtz_apply(&sum, kf, h);

    let mut d = FdState::zeros(s.k, s.grid)?;
    for j in 1..n - 1 {
        let y = s.grid.point(j);
        let shear = -i * (kf * y);
        let dpsi = (psi_a[j + 1] - psi_a[j - 1]) / (2.0 * h);
        let vy = dpsi + i * kf * psi_w[j];
        d.rho[j] = shear * s.rho[j] - s.alpha[j];
        d.alpha[j] = shear * s.alpha[j] - 2.0 * i * kf * vy - lap_sum[j] * acoustic;
        d.omega[j] = shear * s.omega[j] + s.alpha[j];
        d.theta[j] = shear * s.theta[j] - s.alpha[j] * (g - 1.0);
    }
    Ok(d)
}

fn check_step(s: &FdState, params: PhysParams, dt: f64) -> Result<()> {
    let h = s.grid.spacing();
    let acoustic = 0.5 * params.mach * h;
    let phase = PHASE_LIMIT / (s.k.unsigned_abs() as f64 * s.grid.half_width());
    if !(dt > 0.0 && dt <= acoustic * (1.0 + 1e-12)) {
        return Err(Error::Cfl(format!("dt = {dt} exceeds 0.5·M·h = {acoustic}")));
    }
    if dt > phase * (1.0 + 1e-12) {
        return Err(Error::Cfl(format!(
            "dt = {dt} does not resolve the shear phase (|k|·L·dt ≤ {PHASE_LIMIT} needs dt ≤ {phase})"
        )));
    }
    Ok(())
}

/// One RK4 step.
pub fn step_fd(s: &FdState, params: PhysParams, dt: f64) -> Result<FdState> {
    check_step(s, params, dt)?;
    let k1 = rhs(s, params)?;
    let k2 = rhs(&s.axpy(0.5 * dt, &k1), params)?;
    let k3 = rhs(&s.axpy(0.5 * dt, &k2), params)?;
    let k4 = rhs(&s.axpy(dt, &k3), params)?;
    let out = s
        .axpy(dt / 6.0, &k1)
        .axpy(dt / 3.0, &k2)
        .axpy(dt / 3.0, &k3)
        .axpy(dt / 6.0, &k4);
    out.check_boundary()?;
    Ok(out)
}

/// Largest admissible step for a state on this grid.
pub fn max_stable_dt(k: i32, grid: YGrid, params: PhysParams) -> f64 {
    (0.5 * params.mach * grid.spacing()).min(PHASE_LIMIT / (k.unsigned_abs() as f64 * grid.half_width()))
}

/// Evolves to `t_end` with steps no larger than `dt`, evenly dividing the
/// horizon. Returns the state at `t = 0` and after every `sample_every`
/// steps (always including the last).
pub fn evolve_fd(
    s0: &FdState,
    params: PhysParams,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Vec<(f64, FdState)>> {
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::InvalidHorizon(format!("t_end must be nonnegative (got {t_end})")));
    }
    check_step(s0, params, dt)?;
    s0.check_boundary()?;
    let mut out = vec![(0.0, s0.clone())];
    if t_end == 0.0 {
        return Ok(out);
    }
    let steps = (t_end / dt).ceil().max(1.0) as usize;
    let dt = t_end / steps as f64;
    let every = sample_every.max(1);
    let mut s = s0.clone();
    for i in 1..=steps {
        s = step_fd(&s, params, dt)?;
        if i % every == 0 || i == steps {
            out.push((i as f64 * dt, s.clone()));
        }
    }
    Ok(out)
}

/// `‖f_k‖` as the contribution of one x-mode to the `L²(T×R)` norm:
/// `(2π ∫|f_k|² dy)^{1/2}`.
pub fn mode_l2_norm(profile: &[Complex64], grid: YGrid) -> f64 {
    (2.0 * PI * grid.spacing() * profile.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
}

/// y-profile at time `t` of a sheared-frame spectrum:
/// `f_k(t, y) = (1/2π) Σ_j w_j F̂(k, η_j) e^{i(η_j − kt) y}`.
pub fn spectral_profile(f: &SpectralField, k: i32, t: f64, grid: YGrid) -> Result<Vec<Complex64>> {
    let ki = f
        .k_index(k)
        .ok_or_else(|| Error::GridMismatch(format!("spectral field has no row for k = {k}")))?;
    let eg = f.grid();
    let period = 2.0 * PI / eg.spacing();
    if period < 2.0 * grid.half_width() {
        return Err(Error::InvalidGrid(format!(
            "η spacing {} aliases with period {period} < domain length {}",
            eg.spacing(),
            2.0 * grid.half_width()
        )));
    }
    let row = f.row(ki);
    let peak = row.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let edge = row[0].norm().max(row[row.len() - 1].norm());
    if peak > 0.0 && edge > 1e-8 * peak {
        return Err(Error::InvalidGrid(format!(
            "η range does not cover the spectrum: edge/peak = {:e}",
            edge / peak
        )));
    }
    let kf = k as f64;
    let shift = f.shear() + t;
    let mut out = vec![ZERO; grid.len()];
    for (j, v) in row.iter().enumerate() {
        if *v == ZERO {
            continue;
        }
        let xi = eg.point(j) - kf * shift;
        let w = eg.weight(j) / (2.0 * PI);
        for (o, y) in out.iter_mut().zip(grid.points()) {
            *o += v * Complex64::from_polar(w, xi * y);
        }
    }
    Ok(out)
}

/// `‖fd − spectral‖/‖fd‖` per field `(ρ, α, ω, θ)` at time `t`, for spectral
/// fields `(R̂, Â, Ω̂, Θ̂)` on the sheared frame.
pub fn compare_with_spectral(fd: &FdState, spectral: [&SpectralField; 4], t: f64) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for (i, (prof, sf)) in fd.profiles().into_iter().zip(spectral).enumerate() {
        let sp = spectral_profile(sf, fd.k, t, fd.grid)?;
        let diff: Vec<Complex64> = prof.iter().zip(&sp).map(|(a, b)| a - b).collect();
        let base = mode_l2_norm(prof, fd.grid);
        let d = mode_l2_norm(&diff, fd.grid);
        out[i] = if base > 0.0 { d / base } else { d };
    }
    Ok(out)
}
