//! Reproducible parallel sampling.
//!
//! A budget of `N` draws is cut into fixed-size chunks. Chunk `i` draws from a
//! ChaCha8 generator keyed by `seed` on stream `i`, so every draw is a pure
//! function of `(seed, chunk, position)`. Chunk results are gathered in index
//! order and folded sequentially, which makes the outcome independent of how
//! many worker threads ran the chunks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Draws per chunk.
pub const CHUNK_SIZE: u64 = 1 << 14;

pub type SampleRng = ChaCha8Rng;

pub fn chunk_rng(seed: u64, chunk: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Runs `work(rng, draws)` for every chunk of `budget` and returns the chunk
/// results in chunk order.
pub fn par_chunks<A, F>(budget: u64, seed: u64, work: F) -> Vec<A>
where
    A: Send,
    F: Fn(&mut SampleRng, u64) -> A + Sync,
{
    let chunks = budget.div_ceil(CHUNK_SIZE);
    (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * CHUNK_SIZE;
            let draws = CHUNK_SIZE.min(budget - start);
            let mut rng = chunk_rng(seed, chunk);
            work(&mut rng, draws)
        })
        .collect()
}

/// Fills `out` with a point drawn uniformly from the box `[lower, upper]`.
pub fn uniform_in_box<R: Rng + ?Sized>(rng: &mut R, lower: &[f64], upper: &[f64], out: &mut [f64]) {
    for ((o, &lo), &hi) in out.iter_mut().zip(lower).zip(upper) {
        *o = lo + (hi - lo) * rng.random::<f64>();
    }
}

/// A uniformly distributed unit vector in `R^dim` (`dim >= 1`).
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}
