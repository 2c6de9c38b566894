//! Deterministic random streams.
//!
//! Every random draw in this crate comes from a ChaCha8 generator, which is
//! counter based: seeding it and selecting a stream id picks out a fixed,
//! reproducible sequence that does not depend on what other streams were
//! consumed before it. Each randomized object (a matrix filling, a bias
//! vector, a signal, a noise realization) gets its own `(seed, object id)`
//! stream, so experiments can draw objects in any order, or in parallel,
//! without changing what any individual object looks like.

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream ids for the top-level objects drawn directly from a user seed.
pub const MATRIX_STREAM: u64 = 1;
pub const BIAS_STREAM: u64 = 2;
pub const SIGNAL_STREAM: u64 = 3;
pub const NOISE_STREAM: u64 = 4;
pub const BASELINE_STREAM: u64 = 5;

/// Ids at and above this base are reserved for per-trial sub-streams.
const TRIAL_BASE: u64 = 1 << 32;
const TRIAL_BLOCK: u64 = 8;

/// Purpose slots inside one trial's id block.
pub mod purpose {
    /// Matrix entry phases.
    pub const MATRIX: u64 = 0;
    /// Bias phases.
    pub const BIAS: u64 = 1;
    /// Signal support and values.
    pub const SIGNAL: u64 = 2;
    /// Noise draws.
    pub const NOISE: u64 = 3;
}

/// The generator for one `(seed, object id)` stream.
pub fn stream(seed: u64, object_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(object_id);
    rng
}

/// Per-trial sub-stream of a master seed. Trials occupy disjoint id blocks,
/// so a sweep produces the same records no matter how its trials are
/// scheduled across threads.
pub fn trial_stream(master_seed: u64, trial: u64, purpose: u64) -> ChaCha8Rng {
    assert!(purpose < TRIAL_BLOCK, "purpose id out of range");
    stream(master_seed, TRIAL_BASE + trial * TRIAL_BLOCK + purpose)
}

/// Phase uniform on (0, 2*pi]. The half-open end mirrors a draw from (0, 1];
/// which endpoint is included never matters statistically, it just keeps the
/// convention explicit.
pub(crate) fn uniform_phase<R: RngExt>(rng: &mut R) -> f64 {
    let u: f64 = rng.random(); // [0, 1)
    std::f64::consts::TAU * (1.0 - u)
}

/// A point on the circle of the given radius, with uniform phase.
pub(crate) fn circle_point<R: RngExt>(rng: &mut R, radius: f64) -> Complex64 {
    let phase = uniform_phase(rng);
    Complex64::new(radius * phase.cos(), radius * phase.sin())
}
