//! Sparse phase retrieval from magnitude-squared affine measurements.
//!
//! The measurement model is `y_m = |<phi_m, s> + b_m|^2 + v_m` for a
//! k-sparse complex signal `s`, a deterministic column-sparse sensing
//! matrix, and a known bias `b` whose presence removes the global phase
//! ambiguity of classical phase retrieval: the signal itself is
//! identifiable, not just its phase orbit.
//!
//! The crate builds the sensing ensembles ([`sensing`]), simulates
//! measurements under three noise regimes ([`model`]), recovers signals
//! with a two-stage support-then-values algorithm ([`recovery`]), checks
//! the error bounds and geometric identities behind the guarantees
//! ([`analysis`]), and drives seeded Monte-Carlo sweeps ([`bench`]).
//!
//! Start with the examples, one per capability:
//!
//! ```text
//! cargo run --release -p affine-pr --example build_sensing_matrix
//! cargo run --release -p affine-pr --example noise_free_recovery
//! cargo run --release -p affine-pr --example sparse_noise_recovery
//! cargo run --release -p affine-pr --example bounded_noise_recovery
//! cargo run --release -p affine-pr --example collinearity_identity
//! cargo run --release -p affine-pr --example phase_transition
//! ```
//!
//! A thin `affine-pr` binary exposes the same flow as subcommands
//! (`gen-matrix`, `simulate`, `recover`, `verify-theory`, `bench`) over
//! plain text files; see [`io`] for the formats.
//!
//! Everything random is driven by named, counter-based streams ([`rng`]):
//! a master seed plus an object id fully determine every matrix, signal,
//! and noise draw, so runs reproduce bit-for-bit at any thread count.

pub mod analysis;
pub mod bench;
pub mod error;
pub mod io;
pub mod model;
pub mod recovery;
pub mod rng;
pub mod sensing;

pub use analysis::{
    ar_relative_error, error_bound, optimal_bound, optimal_rotation, relative_error,
    run_theory_checks, verify_collinearity_identity, BoundReport, TheoryCheck, TheoryCheckOptions,
};
pub use bench::{run_experiment, ExperimentConfig, ExperimentResult};
pub use error::{Error, Result};
pub use model::{
    apply_noise, generate_signal, generate_signal_on_support, measure, MeasurementVector,
    NoiseMeta, NoiseSpec, SignalDist, SparseSignal,
};
pub use recovery::{
    eta_range, identify_support, recover, recover_entry_closed_form, recover_entry_ls,
    recover_entry_majority, reduced_support, EtaRange, RecoverOptions, RecoveryReport, Regime,
    SupportEstimate,
};
pub use sensing::{
    devore_pattern, random_bias, randomize_entries, verify_uff, zero_pad, BiasVector,
    SparseSensingMatrix, SparsityPattern,
};
