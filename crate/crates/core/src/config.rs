//! Solver budgets and deterministic random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Budgets shared by the optimizers. Every random choice is drawn from a
/// ChaCha stream derived from `seed`, so results are reproducible.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolverConfig {
    pub seed: u64,
    /// Random restarts for multi-start optimizers.
    pub restarts: usize,
    /// Iteration cap for a single ascent run.
    pub max_iter: usize,
    /// Exhaustive partition search runs while `log2` of the number of
    /// candidate assignments stays below this.
    pub partition_guard_log2: f64,
    /// Random starts for partition local search, on top of the greedy start.
    pub local_search_starts: usize,
    /// Iteration cap for cutting-plane and column-generation loops.
    pub column_budget: usize,
    pub tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            restarts: 32,
            max_iter: 500,
            partition_guard_log2: 24.0,
            local_search_starts: 8,
            column_budget: 200,
            tol: 1e-9,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(seed: u64) -> Self {
        SolverConfig { seed, ..Self::default() }
    }

    /// Independent stream `stream` of the configured seed.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        rng(self.seed, stream)
    }
}

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}
