//! Coherently driven three-level ladder atom: master-equation dynamics,
//! fluorescence spectra and photon correlations, with the effective
//! two-level and dressed-state secular reductions.
//!
//! All quantities are in units of the lower-transition decay rate Γ.

/// Library version, echoed into run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod dressed;
pub mod dynamics;
pub mod effective;
pub mod error;
pub mod io;
pub mod linalg;
pub mod liouvillian;
pub mod operators;
pub mod params;
pub mod spectrum;

pub use dressed::{DressedBasis, DressedOp, G2Kind, RateForm, SecularRates, TransitionFrequencies};
pub use dynamics::{CorrelationTrace, Propagator};
pub use effective::EffectiveParams;
pub use error::{Error, Result};
pub use liouvillian::{build_liouvillian, Liouvillian, Model};
pub use operators::{DensityMatrix, Level, Operator3};
pub use params::Params;
pub use spectrum::{SpectrumMethod, SpectrumNormalization, SpectrumResult};
