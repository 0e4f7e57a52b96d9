use thiserror::Error;

/// Errors raised by model construction and the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A closed form was evaluated outside the region where it is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no emission: ⟨Σ₊Σ₋⟩ = {0:.3e} is below the emission threshold")]
    NoEmission(f64),

    #[error("steady state is not unique (null space dimension {0})")]
    NonUniqueSteadyState(usize),

    #[error("dressed levels are degenerate: |ω_i − ω_j| = {0:.3e}")]
    Degenerate(f64),

    #[error("unknown model tag `{0}`")]
    UnknownModel(String),

    #[error("unsupported correlation kind `{0}`")]
    UnsupportedKind(String),

    /// The correlation window is too short for the slowest decay mode.
    #[error("correlation window truncated: τ_max·γ_slow = {0:.3} < 10")]
    Truncation(f64),

    #[error("state is not physical: {0}")]
    NotPhysical(String),

    #[error("numerical failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
