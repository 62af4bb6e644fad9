//! Per-trial random streams.
//!
//! Each trial owns the ChaCha stream selected by its index, so a trial's
//! draws depend only on `(seed, trial)` and never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}
