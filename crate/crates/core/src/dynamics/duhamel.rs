use num_complex::Complex64;

use super::{integrate_with, Coefficients, LinearModeSystem, StepPolicy, WeightedSystem};
use crate::error::Result;
use crate::spectral::{ModeKey, PhysParams};
use crate::symbols::{forcing_f, Convention, WeightedState};

type Mat2 = [[Complex64; 2]; 2];

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Two copies of the homogeneous weighted system advanced together, so that
/// both columns of `Φ_L` share one step sequence. State layout is
/// column-major: `[Φ₀₀, Φ₁₀, Φ₀₁, Φ₁₁]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorSystem {
    inner: WeightedSystem,
}

impl PropagatorSystem {
    pub fn new(key: ModeKey, params: PhysParams, convention: Convention) -> Self {
        PropagatorSystem {
            inner: WeightedSystem::homogeneous(key, params, convention),
        }
    }

    pub fn identity() -> [Complex64; 4] {
        [ONE, ZERO, ZERO, ONE]
    }
}

impl LinearModeSystem<4> for PropagatorSystem {
    fn key(&self) -> ModeKey {
        self.inner.key
    }
    fn params(&self) -> PhysParams {
        self.inner.params
    }
    fn convention(&self) -> Convention {
        self.inner.convention
    }

    #[inline]
    fn coefficients(&self, t: f64) -> Coefficients<4> {
        let l = self.inner.coefficients(t).matrix;
        Coefficients {
            matrix: [
                [l[0][0], l[0][1], 0.0, 0.0],
                [l[1][0], l[1][1], 0.0, 0.0],
                [0.0, 0.0, l[0][0], l[0][1]],
                [0.0, 0.0, l[1][0], l[1][1]],
            ],
            forcing: [ZERO; 4],
        }
    }
}

fn to_mat(v: &[Complex64; 4]) -> Mat2 {
    [[v[0], v[2]], [v[1], v[3]]]
}

fn inverse(m: &Mat2) -> Mat2 {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ]
}

fn mat_vec(m: &Mat2, v: [Complex64; 2]) -> [Complex64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// `Φ_L(t_to, t_from)` of the homogeneous weighted system.
pub fn propagator(
    key: ModeKey,
    params: PhysParams,
    convention: Convention,
    t_from: f64,
    t_to: f64,
    policy: &StepPolicy,
) -> Result<Mat2> {
    if t_from == t_to {
        return Ok([[ONE, ZERO], [ZERO, ONE]]);
    }
    let sys = PropagatorSystem::new(key, params, convention);
    let (lo, hi) = if t_to > t_from { (t_from, t_to) } else { (t_to, t_from) };
    let traj = integrate_with(&sys, lo, PropagatorSystem::identity(), hi, policy, hi - lo, |_| {})?;
    let forward = to_mat(traj.last());
    Ok(if t_to > t_from { forward } else { inverse(&forward) })
}

/// `Φ_L(t, 0)(Zⁱⁿ + ∫₀ᵗ Φ_L(0, s) F(s) source ds)`.
///
/// The integral is taken on the propagator's own step samples: Simpson's
/// rule on each accepted step using its half-step state.
pub fn duhamel_solve(
    z_in: WeightedState,
    source: Complex64,
    key: ModeKey,
    params: PhysParams,
    convention: Convention,
    t_end: f64,
    policy: &StepPolicy,
) -> Result<WeightedState> {
    let sys = PropagatorSystem::new(key, params, convention);
    let integrand = |s: f64, phi: &[Complex64; 4]| -> [Complex64; 2] {
        let f = forcing_f(s, key, params);
        mat_vec(&inverse(&to_mat(phi)), [source * f[0], source * f[1]])
    };
    let mut acc = [ZERO; 2];
    let with_source = source != ZERO;
    let traj = integrate_with(&sys, 0.0, PropagatorSystem::identity(), t_end, policy, t_end, |rec| {
        if !with_source {
            return;
        }
        let g0 = integrand(rec.t0, &rec.y0);
        let gm = integrand(rec.t0 + 0.5 * rec.h, &rec.y_mid);
        let g1 = integrand(rec.t0 + rec.h, &rec.y1);
        let w = rec.h / 6.0;
        for i in 0..2 {
            acc[i] += (g0[i] + gm[i] * 4.0 + g1[i]) * w;
        }
    })?;
    let phi = to_mat(traj.last());
    let z = mat_vec(&phi, [z_in.z1 + acc[0], z_in.z2 + acc[1]]);
    Ok(WeightedState::from_array(z))
}
