use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::pipeline::RunPlan;
use crate::dynamics::{StepPolicy, DEFAULT_MAX_STEPS};
use crate::error::{Error, Result};
use crate::spectral::{
    make_packet, validate_params, EtaGrid, GaussianProfile, Harmonic, InitialDataSpec, InitialFields,
    PacketSpec, PhysParams,
};
use crate::symbols::Convention;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    params: RawParams,
    grid: RawGrid,
    #[serde(default)]
    initial: BTreeMap<String, RawPacket>,
    run: RawRun,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    gamma: f64,
    mach: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    eta_min: f64,
    eta_max: f64,
    n_eta: usize,
    k_set: Vec<i32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHarmonic {
    k: i32,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPacket {
    amplitude: f64,
    #[serde(default)]
    center: f64,
    #[serde(default = "one")]
    width: f64,
    /// Phase of the `e^{ikx}` coefficient, radians.
    #[serde(default)]
    phase: f64,
    harmonics: Option<Vec<RawHarmonic>>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    t_end: f64,
    sample_dt: f64,
    base_dt: Option<f64>,
    c_osc: Option<f64>,
    tol: Option<f64>,
    #[serde(default)]
    convention: Convention,
    out_dir: PathBuf,
    #[serde(default)]
    seed: u64,
    fit_window: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    #[serde(default)]
    gamma: Vec<f64>,
    #[serde(default)]
    mach: Vec<f64>,
    #[serde(default)]
    samples: usize,
}

/// Lists of `γ` and `M` to cross, and the number of random initial data
/// drawn per point (0 keeps the configured data).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub gamma: Vec<f64>,
    pub mach: Vec<f64>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub params: PhysParams,
    pub grid: EtaGrid,
    pub k_set: Vec<i32>,
    pub initial: InitialDataSpec,
    pub t_end: f64,
    pub sample_dt: f64,
    pub policy: StepPolicy,
    pub convention: Convention,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub fit_window: [f64; 2],
    pub sweep: Option<SweepSpec>,
}

const FIELDS: [&str; 4] = ["rho", "alpha", "omega", "theta"];

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        RunConfig::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let params = validate_params(PhysParams {
            gamma: raw.params.gamma,
            mach: raw.params.mach,
        })?;
        let grid = EtaGrid::new(raw.grid.eta_min, raw.grid.eta_max, raw.grid.n_eta)?;
        let mut k_set = raw.grid.k_set.clone();
        k_set.sort_unstable();
        k_set.dedup();
        if k_set.is_empty() || k_set.iter().any(|&k| k <= 0) {
            return Err(Error::Config("k_set must list positive wavenumbers".into()));
        }

        for name in raw.initial.keys() {
            if !FIELDS.contains(&name.as_str()) {
                return Err(Error::Config(format!(
                    "unknown initial field [initial.{name}] (expected one of {FIELDS:?})"
                )));
            }
        }
        let packet = |name: &str| -> Result<PacketSpec> {
            let Some(p) = raw.initial.get(name) else {
                return Ok(PacketSpec::zero());
            };
            let harmonics = match &p.harmonics {
                Some(hs) => {
                    for h in hs {
                        if !k_set.contains(&h.k.abs()) {
                            return Err(Error::Config(format!(
                                "[initial.{name}] harmonic k = {} is not in k_set",
                                h.k
                            )));
                        }
                    }
                    hs.iter()
                        .map(|h| Harmonic {
                            k: h.k,
                            amplitude: Complex64::new(h.re, h.im),
                        })
                        .collect()
                }
                None => k_set
                    .iter()
                    .map(|&k| Harmonic {
                        k,
                        amplitude: Complex64::from_polar(1.0, p.phase),
                    })
                    .collect(),
            };
            Ok(PacketSpec {
                harmonics,
                profile: GaussianProfile {
                    center: p.center,
                    width: p.width,
                    amplitude: p.amplitude,
                },
            })
        };
        let initial = InitialDataSpec {
            rho: packet("rho")?,
            alpha: packet("alpha")?,
            omega: packet("omega")?,
            theta: packet("theta")?,
        };

        let r = &raw.run;
        let defaults = StepPolicy::default();
        let policy = StepPolicy {
            base_dt: r.base_dt.unwrap_or(defaults.base_dt),
            c_osc: r.c_osc.unwrap_or(defaults.c_osc),
            tol: r.tol.unwrap_or(defaults.tol),
            max_steps: DEFAULT_MAX_STEPS,
        };
        let sweep = raw.sweep.map(|s| SweepSpec {
            gamma: s.gamma,
            mach: s.mach,
            samples: s.samples,
        });
        let cfg = RunConfig {
            params,
            grid,
            k_set,
            initial,
            t_end: r.t_end,
            sample_dt: r.sample_dt,
            policy,
            convention: r.convention,
            out_dir: r.out_dir.clone(),
            seed: r.seed,
            fit_window: r.fit_window.unwrap_or([0.1 * r.t_end, r.t_end]),
            sweep,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        validate_params(self.params)?;
        self.policy.validate()?;
        self.initial.validate()?;
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::Config(format!("t_end must be positive (got {})", self.t_end)));
        }
        if !(self.sample_dt.is_finite() && self.sample_dt > 0.0 && self.sample_dt <= self.t_end) {
            return Err(Error::Config(format!(
                "sample_dt must lie in (0, t_end] (got {})",
                self.sample_dt
            )));
        }
        let [lo, hi] = self.fit_window;
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::Config(format!("fit_window must satisfy 0 < lo < hi (got [{lo}, {hi}])")));
        }
        if let Some(s) = &self.sweep {
            for &g in &s.gamma {
                validate_params(PhysParams { gamma: g, mach: self.params.mach })?;
            }
            for &m in &s.mach {
                validate_params(PhysParams { gamma: self.params.gamma, mach: m })?;
            }
        }
        // Packet coverage is checked by building the fields once.
        self.initial_fields()?;
        Ok(())
    }

    pub fn plan(&self) -> RunPlan {
        RunPlan {
            params: self.params,
            convention: self.convention,
            policy: self.policy,
            t_end: self.t_end,
            sample_dt: self.sample_dt,
        }
    }

    /// Initial spectra on the configured grid, with rows for every `±k` in
    /// `k_set`.
    pub fn initial_fields(&self) -> Result<InitialFields> {
        make_packet_on(&self.initial, &self.grid, &self.k_set)
    }

    /// Same configuration with a different `(γ, M)` and output directory.
    pub fn with_params(&self, params: PhysParams, out_dir: PathBuf) -> Self {
        RunConfig {
            params,
            out_dir,
            ..self.clone()
        }
    }
}

/// [`make_packet`], padded with zero rows so every `±k` in `k_set` is present.
pub fn make_packet_on(spec: &InitialDataSpec, grid: &EtaGrid, k_set: &[i32]) -> Result<InitialFields> {
    let mut padded = spec.clone();
    for &k in k_set {
        if !spec.wavenumbers().contains(&k) {
            padded.rho.harmonics.push(Harmonic {
                k,
                amplitude: Complex64::new(0.0, 0.0),
            });
        }
    }
    make_packet(&padded, grid)
}
