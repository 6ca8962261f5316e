//! Global evaluation knobs shared by every layer.

use serde::Serialize;

/// Evaluation configuration.
///
/// One `Config` is attached to the [`crate::classical::Structure`] and flows
/// from there into signing, matrix evaluation and entailment checking.
#[derive(Clone, Debug, Serialize)]
pub struct Config {
    /// Enumeration range for `Int`-typed variables and for the value domain
    /// of `Int`-valued quantum variables (inclusive on both ends).
    pub int_range: (i64, i64),
    /// Absolute tolerance for all approximate numeric comparisons.
    pub tol: f64,
    /// Hard cap on the dimension of either side of a grounded signature.
    pub max_dim: usize,
    /// Number of seeded random matrices drawn per operator variable when a
    /// quantifier or valuation over operators has to be sampled.
    pub samples: usize,
    /// Master seed for all sampling.
    pub seed: u64,
    /// Cap on the number of classical states an entailment check may
    /// enumerate before giving up with an `Unknown` verdict.
    pub max_states: u64,
    /// Cap on recursion depth when unrolling recursive definitions.
    pub max_unroll: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            int_range: (-64, 64),
            tol: 1e-9,
            max_dim: 4096,
            samples: 20,
            seed: 42,
            max_states: 1 << 24,
            max_unroll: 4096,
        }
    }
}

impl Config {
    pub fn with_int_range(mut self, lo: i64, hi: i64) -> Self {
        self.int_range = (lo, hi);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }
}
