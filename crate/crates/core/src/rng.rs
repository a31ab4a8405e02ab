//! Seeded RNG streams.
//!
//! Every sampler takes either a seed or an explicit generator. Parallel work
//! derives one ChaCha8 stream per task from `(master seed, task index)`, so
//! results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TaskRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> TaskRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream number `task` under `master`.
pub fn task_rng(master: u64, task: u64) -> TaskRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(task);
    rng
}
