//! Seed derivation. Every parallel task draws from its own ChaCha stream,
//! selected by `(master seed, task index)`, so results never depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TaskRng = ChaCha8Rng;

pub fn master_rng(seed: u64) -> TaskRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent generator for task `index` under `seed`.
pub fn task_rng(seed: u64, index: u64) -> TaskRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
