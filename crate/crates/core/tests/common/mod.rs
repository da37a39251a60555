#![allow(dead_code)]

use shuffle_pd::sampler::{sample_rng, Sampler};
use shuffle_pd::{Alphabet, Expr, ExprArena};

/// A uniformly drawn expression of size `n` over the first `k` letters,
/// in a fresh arena.
pub fn draw(k: usize, n: usize, seed: u64, index: u64) -> (ExprArena, Expr) {
    let sampler = Sampler::new(k as u64, n).unwrap();
    let mut arena = ExprArena::new(Alphabet::standard(k));
    let e = sampler.sample(&mut arena, n, &mut sample_rng(seed, index));
    (arena, e)
}
