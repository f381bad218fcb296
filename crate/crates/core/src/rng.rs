//! Per-stage RNG seeding.
//!
//! Every randomized stage draws from its own ChaCha8 stream derived from the
//! single run seed, so changing one stage never perturbs another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default run seed.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Louvain,
    KMeans { k: usize, restart: usize },
}

impl Stage {
    fn id(self) -> u64 {
        match self {
            Stage::Louvain => 1,
            Stage::KMeans { k, restart } => 0x1000 + ((k as u64) << 8) + restart as u64,
        }
    }
}

/// Deterministic generator for `stage` under the run seed.
pub fn stage_rng(seed: u64, stage: Stage) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stage.id());
    rng
}
