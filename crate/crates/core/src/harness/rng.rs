//! Seed splitting.
//!
//! A master seed keys one ChaCha8 generator per purpose, separated by the
//! ChaCha stream id:
//!
//! * stream 0 drives the interference chain (one uniform per slot);
//! * stream 1 drives fading. Slot `t` reads its branch gains starting at word
//!   `2 · t · stride`, so branch `i` of slot `t` sees the same gain whatever
//!   the allocation policy.
//!
//! Replication `k` of a sweep uses master seed `seed + k` (wrapping).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Substream {
    Chain,
    Fading,
}

impl Substream {
    fn id(self) -> u64 {
        match self {
            Substream::Chain => 0,
            Substream::Fading => 1,
        }
    }
}

pub fn substream(seed: u64, which: Substream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which.id());
    rng
}

pub(crate) fn replication_seed(seed: u64, replication: u64) -> u64 {
    seed.wrapping_add(replication)
}

/// Positions the fading generator at the first gain of `slot`.
pub(crate) fn seek_slot(rng: &mut ChaCha8Rng, slot: u64, stride: u64) {
    rng.set_word_pos(2 * slot as u128 * stride as u128);
}
