//! Spectral simulator and verification toolkit for the linearized 2D
//! non-isentropic compressible Euler equations around Couette flow.
//!
//! The nonzero x-modes are advanced per `(k, η)` in the sheared frame
//! ([`dynamics`]), physical fields are rebuilt from the transported
//! invariants ([`fields`]), the x-averaged part is a 1D acoustic problem
//! ([`zero_mode`]), and an independent finite-difference solver in the
//! original coordinates ([`fd_oracle`]) cross-checks the spectral path.
//! [`analysis`] turns runs into norm series, fitted rates and bound ratios.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod fd_oracle;
pub mod fields;
pub mod spectral;
pub mod symbols;
pub mod zero_mode;

pub use error::{Error, Result};
pub use spectral::{EtaGrid, ModeKey, PhysParams, SpectralField, YGrid};
pub use symbols::Convention;
