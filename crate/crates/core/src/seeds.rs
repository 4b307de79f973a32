//! Deterministic random streams.
//!
//! Every sampler takes a plain `u64` seed and builds its own ChaCha8 generator,
//! so outputs are reproducible across platforms and independent of call order.
//! Experiment stages get their own stream via [`derive_seed`], which keys the
//! ChaCha stream id on `(trial, stage)`; adding a new stage tag never shifts
//! the seeds of existing stages.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stage tags used by the experiment pipeline. The numeric value is part of
/// the seed derivation and must never be reused for a different purpose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[repr(u32)]
pub enum Stage {
    Game = 1,
    Temperatures = 2,
    Train = 3,
    Rl = 4,
    Test = 5,
    Mix = 6,
    SimTrain = 7,
    AltTrain = 8,
    AltRl = 9,
    AltTest = 10,
    AltMix = 11,
}

impl Stage {
    pub fn tag(self) -> &'static str {
        match self {
            Stage::Game => "game",
            Stage::Temperatures => "temperatures",
            Stage::Train => "train",
            Stage::Rl => "rl",
            Stage::Test => "test",
            Stage::Mix => "mix",
            Stage::SimTrain => "sim_train",
            Stage::AltTrain => "alt_train",
            Stage::AltRl => "alt_rl",
            Stage::AltTest => "alt_test",
            Stage::AltMix => "alt_mix",
        }
    }
}

/// Seed for `(master, trial, stage)`.
pub fn derive_seed(master: u64, trial: u32, stage: Stage) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream((u64::from(trial) << 32) | stage as u64);
    rng.random()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_are_stable_and_distinct() {
        let a = derive_seed(7, 0, Stage::Train);
        assert_eq!(a, derive_seed(7, 0, Stage::Train));
        assert_ne!(a, derive_seed(7, 1, Stage::Train));
        assert_ne!(a, derive_seed(7, 0, Stage::Test));
        assert_ne!(a, derive_seed(8, 0, Stage::Train));
    }
}
