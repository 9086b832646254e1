//! Run pipeline, norm series, rate fits, bound checks, sweeps and
//! configuration.

pub mod bounds;
pub mod config;
pub mod fit;
pub mod oracle;
pub mod pipeline;
pub mod run;
pub mod series;
pub mod sweep;

pub use bounds::{
    data_norms, duhamel_bound_check, reference_constant, theorem_bound_report, DataNorms, DuhamelBound,
    TheoremReport,
};
pub use config::{RunConfig, SweepSpec};
pub use fit::{fit_power_law, PowerFit};
pub use oracle::{oracle_compare, OracleReport, OracleSetup};
pub use pipeline::{RunPlan, SpectralRun};
pub use run::{execute, run_config, Artifacts, Report, RunOutcome};
pub use series::{NormSeries, CSV_COLUMNS};
pub use sweep::{lyapunov_sweep, run_sweep, sample_margin};
