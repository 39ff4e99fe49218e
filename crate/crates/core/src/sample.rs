//! Seeded random word generation for the verification harnesses.

use crate::words::{Letter, Sign, Word};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly random word with length in 0..=max_len and indices in
/// 0..=max_index.
pub fn random_word(rng: &mut impl Rng, max_index: u32, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    let letters = (0..len)
        .map(|_| Letter {
            index: rng.gen_range(0..=max_index),
            sign: if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus },
        })
        .collect();
    Word::from_letters(letters)
}
