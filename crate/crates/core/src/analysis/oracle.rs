//! Spectral solution versus the finite-difference oracle at one wavenumber.

use serde::Serialize;
use std::f64::consts::PI;

use super::config::make_packet_on;
use super::pipeline::{RunPlan, SpectralRun};
use crate::dynamics::StepPolicy;
use crate::error::{Error, Result};
use crate::fd_oracle::{compare_with_spectral, evolve_fd, max_stable_dt, FdState};
use crate::spectral::{EtaGrid, InitialDataSpec, PacketSpec, PhysParams, YGrid, MIN_GRID_WIDTHS};
use crate::symbols::Convention;

/// Target y-spacing of the coarsest oracle level.
pub const BASE_DY: f64 = 0.05;

/// Discretization of one oracle comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleSetup {
    pub k: i32,
    pub t: f64,
    pub y_half_width: f64,
    pub n_y: usize,
    pub eta_half_width: f64,
    pub n_eta: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleLevel {
    pub n_y: usize,
    pub n_eta: usize,
    /// Relative L² discrepancy of `(ρ, α, ω, θ)`.
    pub discrepancy: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub k: i32,
    pub t: f64,
    pub levels: Vec<OracleLevel>,
    /// Every field's discrepancy shrinks from each level to the next.
    pub monotone: bool,
}

fn restrict(p: &PacketSpec, k: i32) -> PacketSpec {
    PacketSpec {
        harmonics: p.harmonics.iter().copied().filter(|h| h.k.abs() == k).collect(),
        profile: p.profile,
    }
}

/// Packet data reduced to the harmonics at `±k`.
pub fn restrict_to(spec: &InitialDataSpec, k: i32) -> InitialDataSpec {
    InitialDataSpec {
        rho: restrict(&spec.rho, k),
        alpha: restrict(&spec.alpha, k),
        omega: restrict(&spec.omega, k),
        theta: restrict(&spec.theta, k),
    }
}

impl OracleSetup {
    /// Sizes the y-domain so the packets, their acoustic cones and the
    /// `e^{−|k||y|}` Helmholtz tails stay clear of the boundary, the η range
    /// so the narrowest packet's spectrum has decayed at its edges, and the
    /// η spacing so its aliasing period exceeds the domain.
    pub fn for_data(spec: &InitialDataSpec, params: PhysParams, k: i32, t: f64) -> Result<Self> {
        if k <= 0 {
            return Err(Error::ZeroWavenumber);
        }
        let active: Vec<_> = spec
            .fields()
            .into_iter()
            .filter(|(_, p)| !p.harmonics.is_empty() && p.profile.amplitude != 0.0)
            .map(|(_, p)| p.profile)
            .collect();
        let reach = active.iter().map(|p| p.center.abs() + 8.0 * p.width).fold(0.0f64, f64::max);
        let w_min = active.iter().map(|p| p.width).fold(f64::INFINITY, f64::min);
        let eta_half_width = if w_min.is_finite() { (MIN_GRID_WIDTHS / w_min).ceil() } else { 1.0 };
        let half = (reach + params.sound_speed() * t + 25.0 / k as f64).ceil();
        let n_y = (2.0 * half / BASE_DY).round() as usize + 1;
        let max_deta = 0.9 * PI / half;
        let mut n_eta = 65;
        while 2.0 * eta_half_width / (n_eta - 1) as f64 > max_deta {
            n_eta = 2 * (n_eta - 1) + 1;
        }
        Ok(OracleSetup {
            k,
            t,
            y_half_width: half,
            n_y,
            eta_half_width,
            n_eta,
            tol: 1e-10,
        })
    }

    /// Both discretizations refined 2×.
    pub fn refined(&self) -> Self {
        OracleSetup {
            n_y: 2 * (self.n_y - 1) + 1,
            n_eta: 2 * (self.n_eta - 1) + 1,
            ..*self
        }
    }
}

/// Runs both solvers to `setup.t` and compares the y-profiles at `k`.
pub fn oracle_level(spec: &InitialDataSpec, params: PhysParams, setup: &OracleSetup) -> Result<OracleLevel> {
    let data = restrict_to(spec, setup.k);
    let ygrid = YGrid::new(setup.y_half_width, setup.n_y)?;
    let fd0 = FdState::from_initial(&data, setup.k, ygrid)?;
    let dt = max_stable_dt(setup.k, ygrid, params);
    let fd = evolve_fd(&fd0, params, setup.t, dt, usize::MAX)?
        .pop()
        .expect("final state")
        .1;

    let egrid = EtaGrid::symmetric(setup.eta_half_width, setup.n_eta)?;
    let init = make_packet_on(&data, &egrid, &[setup.k])?;
    let discrepancy = if setup.t == 0.0 {
        compare_with_spectral(&fd, [&init.rho, &init.alpha, &init.omega, &init.theta], 0.0)?
    } else {
        let plan = RunPlan {
            params,
            convention: Convention::Derived,
            policy: StepPolicy {
                tol: setup.tol,
                ..StepPolicy::default()
            },
            t_end: setup.t,
            sample_dt: setup.t,
        };
        let run = SpectralRun::evolve(&init, plan)?;
        let f = run.fields(run.n_samples() - 1)?;
        compare_with_spectral(&fd, [&f.r, &f.a, &f.omega, &f.theta], setup.t)?
    };
    Ok(OracleLevel {
        n_y: setup.n_y,
        n_eta: setup.n_eta,
        discrepancy,
    })
}

/// `levels` comparisons, refining both discretizations 2× each time.
pub fn oracle_compare(
    spec: &InitialDataSpec,
    params: PhysParams,
    setup: OracleSetup,
    levels: usize,
) -> Result<OracleReport> {
    let mut out = Vec::new();
    let mut s = setup;
    for _ in 0..levels.max(1) {
        out.push(oracle_level(spec, params, &s)?);
        s = s.refined();
    }
    let monotone = out
        .windows(2)
        .all(|w| (0..4).all(|i| {
            let (a, b) = (w[0].discrepancy[i], w[1].discrepancy[i]);
            b < a || (a == 0.0 && b == 0.0)
        }));
    Ok(OracleReport {
        k: setup.k,
        t: setup.t,
        levels: out,
        monotone,
    })
}
