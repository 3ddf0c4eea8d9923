//! The crate's single random number generator.
//!
//! All randomness (fund selection, synthetic universes, Monte-Carlo checks)
//! comes from ChaCha8 seeded with a `u64`. Rolling-window studies give every
//! window its own ChaCha stream, indexed by window position, so results do
//! not depend on how windows are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StudyRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> StudyRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> StudyRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
