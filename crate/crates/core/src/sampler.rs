//! Exact uniform generation of ∅-free expressions and the sampling harness.
//!
//! Sampling draws a uniform rank below `r[n]` and unranks it with the
//! counting table: the root production is chosen with weight equal to the
//! number of expressions it yields at size `n`, and binary splits with weight
//! `r[i]·r[n−1−i]`. The rank order matches [`enumerate_all`], so
//! `unrank(n, i)` is the `i`-th enumerated expression.
//!
//! [`enumerate_all`]: crate::combinatorics::enumerate_all

use num_bigint::{BigUint, RandBigInt};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::combinatorics::{coefficients, CoeffTable, CombinatoricsError};
use crate::derive::{closure, pi_count, DEFAULT_STATE_BUDGET};
use crate::syntax::{Alphabet, Expr, ExprArena, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SamplerError {
    #[error("expression size must be at least 1")]
    ZeroSize,
    #[error("at least one sample is required")]
    NoSamples,
    #[error(transparent)]
    Table(#[from] CombinatoricsError),
}

/// Uniform sampler for expressions of sizes up to a fixed maximum.
#[derive(Debug, Clone)]
pub struct Sampler {
    table: CoeffTable,
}

impl Sampler {
    pub fn new(k: u64, n_max: usize) -> Result<Self, SamplerError> {
        if n_max == 0 {
            return Err(SamplerError::ZeroSize);
        }
        Ok(Sampler {
            table: coefficients(k, n_max)?,
        })
    }

    pub fn k(&self) -> u64 {
        self.table.k
    }

    pub fn n_max(&self) -> usize {
        self.table.n_max
    }

    /// Number of expressions of size `n`.
    pub fn count(&self, n: usize) -> &BigUint {
        &self.table.r[n]
    }

    /// The expression of size `n` with the given rank, `rank < r[n]`.
    ///
    /// # Panics
    /// If `n` is out of range, the rank is too large, or the arena's
    /// alphabet size differs from `k`.
    pub fn unrank(&self, arena: &mut ExprArena, n: usize, rank: &BigUint) -> Expr {
        assert_eq!(arena.alphabet().len() as u64, self.table.k);
        assert!(n >= 1 && n <= self.table.n_max);
        assert!(rank < &self.table.r[n], "rank out of range");
        self.unrank_inner(arena, n, rank.clone())
    }

    fn unrank_inner(&self, arena: &mut ExprArena, n: usize, mut rank: BigUint) -> Expr {
        let r = &self.table.r;
        if n == 1 {
            let i = usize::try_from(&rank).expect("leaf rank is small");
            return if i == 0 {
                arena.eps()
            } else {
                arena.sym(Symbol::from_index(i - 1))
            };
        }
        if rank < r[n - 1] {
            let inner = self.unrank_inner(arena, n - 1, rank);
            return arena.star(inner);
        }
        rank -= &r[n - 1];
        for left in 1..n - 1 {
            let right = n - 1 - left;
            let block = &r[left] * &r[right];
            for op in 0..3 {
                if rank < block {
                    let (ra, rb) = (&rank / &r[right], &rank % &r[right]);
                    let a = self.unrank_inner(arena, left, ra);
                    let b = self.unrank_inner(arena, right, rb);
                    return match op {
                        0 => arena.union(a, b),
                        1 => arena.concat(a, b),
                        _ => arena.shuffle(a, b),
                    };
                }
                rank -= &block;
            }
        }
        unreachable!("rank below r[n] always lands in a block")
    }

    /// Draws an expression of size `n` uniformly at random.
    pub fn sample(&self, arena: &mut ExprArena, n: usize, rng: &mut impl rand::Rng) -> Expr {
        assert!(n >= 1 && n <= self.table.n_max);
        debug_assert!(!self.table.r[n].is_zero());
        let rank = rng.gen_biguint_below(&self.table.r[n]);
        self.unrank(arena, n, &rank)
    }
}

/// Random stream for sample `index` of a run seeded with `seed`; streams for
/// different indices are independent, so results do not depend on the order
/// in which samples are evaluated.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws one expression of size `n` over the arena's alphabet.
pub fn sample_uniform(arena: &mut ExprArena, n: usize, seed: u64) -> Result<Expr, SamplerError> {
    if n == 0 {
        return Err(SamplerError::ZeroSize);
    }
    let sampler = Sampler::new(arena.alphabet().len() as u64, n)?;
    Ok(sampler.sample(arena, n, &mut sample_rng(seed, 0)))
}

/// Measurements for one sampled expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleRecord {
    pub index: u64,
    pub size: u64,
    pub width: u64,
    /// `|pi(α)|` and the state count of the automaton; `None` when the
    /// derivative closure exceeded the state budget.
    pub measured: Option<(usize, usize)>,
}

/// Draws `samples` expressions and measures each, in parallel.
pub fn sample_records(
    k: u64,
    n: usize,
    samples: u64,
    seed: u64,
    budget: usize,
) -> Result<Vec<SampleRecord>, SamplerError> {
    if samples == 0 {
        return Err(SamplerError::NoSamples);
    }
    let sampler = Sampler::new(k, n)?;
    let alphabet = Alphabet::standard(k as usize);
    Ok((0..samples)
        .into_par_iter()
        .map(|index| {
            let mut arena = ExprArena::new(alphabet.clone());
            let e = sampler.sample(&mut arena, n, &mut sample_rng(seed, index));
            // The closure is bounded by the budget and |pi| = |∂⁺| ≤ |∂|, so
            // pi is only computed once the closure is known to fit.
            let measured = closure(&mut arena, e, budget)
                .ok()
                .map(|c| (pi_count(&mut arena, e) as usize, c.all.len()));
            SampleRecord {
                index,
                size: arena.size(e),
                width: arena.width(e),
                measured,
            }
        })
        .collect())
}

/// Aggregated statistics of one sampling run.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleStats {
    pub k: u64,
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    pub mean_width: f64,
    pub mean_pi: f64,
    pub max_pi: usize,
    pub mean_states: f64,
    /// Mean of `2^{|α|_Σ}` over the measured samples.
    pub bound_worst: f64,
    /// Mean of `(4/3)^{|α|_Σ}` over the measured samples.
    pub bound_avg: f64,
    /// Mean of `2^{|α|_Σ} − 1`, the worst-case bound on `|pi(α)|`.
    pub bound_pi: f64,
    /// Largest `2^{|α|_Σ}` among the measured samples.
    pub max_bound_worst: f64,
    pub censored: u64,
}

impl SampleStats {
    pub const CSV_HEADER: &'static str =
        "k,n,samples,seed,mean_width,mean_pi,max_pi,mean_states,bound_worst,bound_avg,censored";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.k,
            self.n,
            self.samples,
            self.seed,
            self.mean_width,
            self.mean_pi,
            self.max_pi,
            self.mean_states,
            self.bound_worst,
            self.bound_avg,
            self.censored
        )
    }
}

/// Samples, measures and aggregates; averages are taken over the samples
/// whose closure fit in the budget, and the rest are counted as censored.
pub fn run_stats(
    k: u64,
    n: usize,
    samples: u64,
    seed: u64,
    budget: usize,
) -> Result<SampleStats, SamplerError> {
    let records = sample_records(k, n, samples, seed, budget)?;
    Ok(aggregate(k, n, samples, seed, &records))
}

/// [`run_stats`] with the default closure budget.
pub fn run_stats_default(k: u64, n: usize, samples: u64, seed: u64) -> Result<SampleStats, SamplerError> {
    run_stats(k, n, samples, seed, DEFAULT_STATE_BUDGET)
}

fn aggregate(k: u64, n: usize, samples: u64, seed: u64, records: &[SampleRecord]) -> SampleStats {
    let mut count = 0u64;
    let (mut width, mut pi, mut states) = (0.0, 0.0, 0.0);
    let (mut worst, mut avg, mut bound_pi, mut max_bound) = (0.0, 0.0, 0.0, 0.0f64);
    let mut max_pi = 0;
    for rec in records {
        let Some((p, s)) = rec.measured else { continue };
        count += 1;
        let w = rec.width as f64;
        width += w;
        pi += p as f64;
        states += s as f64;
        max_pi = max_pi.max(p);
        worst += w.exp2();
        bound_pi += w.exp2() - 1.0;
        avg += (4.0f64 / 3.0).powf(w);
        max_bound = max_bound.max(w.exp2());
    }
    let c = count as f64;
    SampleStats {
        k,
        n,
        samples,
        seed,
        mean_width: width / c,
        mean_pi: pi / c,
        max_pi,
        mean_states: states / c,
        bound_worst: worst / c,
        bound_avg: avg / c,
        bound_pi: bound_pi / c,
        max_bound_worst: max_bound,
        censored: samples - count,
    }
}
