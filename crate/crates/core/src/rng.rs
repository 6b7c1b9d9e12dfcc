//! Seeding for the portable per-sample generator.
//!
//! Every paragraph gets its own ChaCha8 stream keyed by
//! `(seed, article_id, paragraph_index)`, so the randomness a sample sees does
//! not depend on shard order or on how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xxhash_rust::xxh3::xxh3_64_with_seed;

pub type SampleRng = ChaCha8Rng;

/// Generator for one paragraph.
pub fn paragraph_rng(seed: u64, article_id: &str, paragraph_index: usize) -> SampleRng {
    let mut key = Vec::with_capacity(article_id.len() + 9);
    key.extend_from_slice(article_id.as_bytes());
    key.push(0xff); // not valid UTF-8, so ids cannot collide with the suffix
    key.extend_from_slice(&(paragraph_index as u64).to_le_bytes());
    ChaCha8Rng::seed_from_u64(xxh3_64_with_seed(&key, seed))
}

/// Generator for a named pipeline stage (interleaving, reservoirs).
pub fn stage_rng(seed: u64, stage: &str, index: u64) -> SampleRng {
    let mut key = stage.as_bytes().to_vec();
    key.push(0xff);
    key.extend_from_slice(&index.to_le_bytes());
    ChaCha8Rng::seed_from_u64(xxh3_64_with_seed(&key, seed))
}
