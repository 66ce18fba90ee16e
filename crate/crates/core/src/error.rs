//! Error type shared across the toolkit.

use thiserror::Error;

/// Convenience alias used by every fallible operation in this crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// System descriptions must have at least one setting and one outcome per party.
    #[error("invalid system: {0}")]
    InvalidSystem(String),

    /// Table failed a structural check (bounds, normalization, shape).
    #[error("invalid table: {what} (worst deviation {deviation:.3e})")]
    InvalidTable { what: String, deviation: f64 },

    /// A marginal depends on the discarded parties' settings.
    #[error(
        "no-signalling violated: deviation {deviation:.3e} on party subset {subset:?} \
         between complement settings {settings_a:?} and {settings_b:?}"
    )]
    NoSignalling {
        deviation: f64,
        subset: Vec<usize>,
        settings_a: Vec<usize>,
        settings_b: Vec<usize>,
    },

    /// Party index lists must be sorted, unique, and in range.
    #[error("party selection invalid: {0}")]
    PartySelection(String),

    /// Conditioning requires the conditioned outcome to have positive probability.
    #[error(
        "conditioning on zero-probability outcome: party {party}, outcome {outcome}, \
         setting {setting} has probability {probability:.3e}"
    )]
    ZeroProbability {
        party: usize,
        outcome: usize,
        setting: usize,
        probability: f64,
    },

    /// Operation requires a classical party (single fiducial setting).
    #[error("party {party} is not classical (has {settings} fiducial settings)")]
    NotClassical { party: usize, settings: usize },

    /// Two objects that must live on the same system do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Adaptive wiring enumeration is restricted to small party counts.
    #[error("adaptive enumeration supports at most {max} parties, got {got}")]
    TooManyParties { max: usize, got: usize },

    /// Probability vectors must be non-negative and normalized.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// Classical processing maps must be column-stochastic.
    #[error("invalid stochastic matrix: {0}")]
    InvalidStochasticMatrix(String),

    /// Catch-all for out-of-range scalar parameters.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Density matrix failed Hermiticity / positivity / trace checks.
    #[error("quantum state invalid: {0}")]
    InvalidQuantumState(String),

    /// Wrapper for serialization problems surfaced through the library API.
    #[error("json: {0}")]
    Json(String),
}
