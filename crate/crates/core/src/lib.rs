//! Numerical toolkit for generalized probabilistic theories (GPTs).
//!
//! The crate represents multipartite no-signalling behaviors as explicit
//! conditional-probability tables, computes their measurement entropy by
//! minimizing Shannon entropy over an enumerated family of fine-grained
//! (possibly adaptive) measurements, and checks the entropic inequalities —
//! data processing, strong subadditivity, and the chain of lemmas built on
//! them — whose joint validity forces the Tsirelson bound on CHSH games.
//! Classical and quantum behaviors satisfy the whole chain; box-world
//! behaviors break identified links, and the information-causality game
//! module quantifies how badly.
//!
//! Layers, bottom to top:
//!
//! - [`system`] / [`state`]: typed party lists and validated state tables
//!   with tensor, marginal, conditioning, and mixing.
//! - [`transform`]: local operations (discard, wiring, classical processing,
//!   classical cloning) under which entropy inequalities are stated.
//! - [`entropy`]: the measurement-entropy minimizer and conditional /
//!   mutual-information derived quantities.
//! - [`quantum`]: density matrices, von Neumann entropy, and qubit-pair
//!   behavior tables from projective measurements.
//! - [`bell`]: CHSH values, the classical and quantum maxima, and the
//!   Tsirelson interval check.
//! - [`sampler`]: seeded random no-signalling, classical, and box-world
//!   states for counterexample searches.
//! - [`icgame`]: the van Dam information-causality game, its transcript
//!   states, and threshold sweeps.
//! - [`inequalities`]: checkers for the individual inequalities, the full
//!   proof-chain trace, and randomized counterexample search.

pub mod bell;
pub mod entropy;
pub mod error;
pub mod icgame;
pub mod inequalities;
pub mod quantum;
pub mod report;
pub mod sampler;
pub mod state;
pub mod system;
pub mod transform;

pub use bell::{
    chsh_value, correlator, max_classical_chsh, max_quantum_chsh, optimize_chsh_angles,
    tsirelson_check, ClassicalChsh, QuantumChsh, TSIRELSON_S,
};
pub use entropy::{
    binary_entropy, conditional_entropy, conditional_entropy_detailed, enumerate_fine_grained,
    measurement_entropy, measurement_entropy_with_mode, mutual_information, shannon_entropy,
    Effect, EntropyValue, Measurement, ADAPTIVE_PARTY_LIMIT,
};
pub use error::{Error, Result};
pub use icgame::{
    analytic_i, analytic_success, classical_shared_randomness_box, guess_pair, i_from_transcript,
    ic_frontier, ic_threshold_sweep, monte_carlo_success, play, transcript_from_box, FrontierRow,
    GameConfig, GameMode, GameResult, IcTranscript, SweepRow, MAX_K,
};
pub use inequalities::{
    check_dpi, check_lemma, check_ssa, check_subadditivity, search_counterexamples,
    trace_theorem2_chain, InequalityKind, LemmaParams, ProofChainTrace, SearchConfig,
    SearchOutcome,
};
pub use quantum::{
    qubit_pair_behavior, random_density_matrix, singlet, singlet_correlator, von_neumann_entropy,
    DensityMatrix, MeasurementAngles, QUANTUM_TOL,
};
pub use sampler::{
    boxworld_vertices, dirichlet_weights, sample_boxworld_state, sample_classical_state,
    sample_local_deterministic_mixture,
};
pub use report::{CheckReport, Verdict, Witness};
pub use state::{build_named_state, NamedState, StateTable, ValidationReport};
pub use system::{PartyType, SystemType};
pub use transform::{apply_local_transformation, clone_classical, Transformation};

/// Tolerance for state-table identities: normalization, no-signalling,
/// probability bounds, stochasticity.
pub const TABLE_TOL: f64 = 1e-12;

/// Tolerance for entropy comparisons and inequality verdicts.
pub const ENTROPY_TOL: f64 = 1e-9;
