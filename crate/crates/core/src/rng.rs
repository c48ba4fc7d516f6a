//! Seeded sub-streams and deterministic parallel reduction.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Samples per work block. Block `j` always draws from stream `j`, so results
/// do not depend on the number of worker threads.
pub const BLOCK: usize = 4096;

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `f(rng, count)` over consecutive blocks covering `n` samples and
/// returns the block results in block order.
pub fn par_blocks<T, F>(n: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    let blocks = n.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|j| {
            let count = BLOCK.min(n - j * BLOCK);
            let mut rng = stream(seed, j as u64);
            f(&mut rng, count)
        })
        .collect()
}

/// Like [`par_blocks`] but flattens per-block vectors into one sample vector.
pub fn par_samples<T, F>(n: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    par_blocks(n, seed, |rng, count| (0..count).map(|_| f(rng)).collect::<Vec<_>>())
        .into_iter()
        .flatten()
        .collect()
}
