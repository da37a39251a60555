//! Exact generating-function coefficients and asymptotic size estimates.
//!
//! For expressions without ∅ over `k` letters, with size counted as the
//! number of symbols (parentheses excluded):
//!
//! - `R_k(z) = (1+k)z + 3zR_k² + zR_k` counts expressions,
//! - `L_k(z) = kz + 6zL_kR_k + zL_k = kz/√Δ_k(z)` sums letter occurrences,
//! - `P_k(z) = kz + 6zP_kR_k + zP_k + zP_k²` sums the upper bound `p(α)`
//!   on `|pi(α)|`,
//!
//! with `Δ_k(z) = 1 − 2z − (11+12k)z²` and `Δ'_k(z) = 1 − 2z − (11+16k)z²`.
//! Coefficients are computed exactly from the convolution recurrences; the
//! asymptotic formulas are evaluated in log space so that `n = 10⁸` does not
//! overflow.

use std::f64::consts::{LN_2, PI};
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::syntax::{Expr, ExprArena, Symbol};

/// Largest `n_max` accepted by [`coefficients`].
pub const MAX_TABLE_SIZE: usize = 5_000;

/// Largest class size [`enumerate_all`] will materialise.
pub const DEFAULT_ENUMERATION_GUARD: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombinatoricsError {
    #[error("alphabet size must be at least 1")]
    ZeroAlphabet,
    #[error("n_max = {n} is outside 1..={max}")]
    TableSize { n: usize, max: usize },
    #[error("enumerating sizes up to {n} needs {count} expressions, above the guard {guard}")]
    EnumerationGuard { n: usize, count: String, guard: u64 },
}

/// Exact coefficients `[zⁿ]R_k`, `[zⁿ]L_k`, `[zⁿ]P_k` for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffTable {
    pub k: u64,
    pub n_max: usize,
    pub r: Vec<BigUint>,
    pub l: Vec<BigUint>,
    pub p: Vec<BigUint>,
}

fn convolve(a: &[BigUint], b: &[BigUint], total: usize) -> BigUint {
    (0..=total).fold(BigUint::zero(), |acc, i| acc + &a[i] * &b[total - i])
}

/// Runs the coefficient recurrences up to `n_max`.
pub fn coefficients(k: u64, n_max: usize) -> Result<CoeffTable, CombinatoricsError> {
    if k == 0 {
        return Err(CombinatoricsError::ZeroAlphabet);
    }
    if n_max == 0 || n_max > MAX_TABLE_SIZE {
        return Err(CombinatoricsError::TableSize {
            n: n_max,
            max: MAX_TABLE_SIZE,
        });
    }
    let len = n_max + 1;
    let mut r = vec![BigUint::zero(); len];
    let mut l = vec![BigUint::zero(); len];
    let mut p = vec![BigUint::zero(); len];
    for n in 1..len {
        let m = n - 1;
        let (leaf_r, leaf_lp) = if n == 1 {
            (BigUint::from(k + 1), BigUint::from(k))
        } else {
            (BigUint::zero(), BigUint::zero())
        };
        r[n] = leaf_r + convolve(&r, &r, m) * 3u32 + &r[m];
        l[n] = &leaf_lp + convolve(&l, &r, m) * 6u32 + &l[m];
        p[n] = leaf_lp + convolve(&p, &r, m) * 6u32 + convolve(&p, &p, m) + &p[m];
    }
    Ok(CoeffTable { k, n_max, r, l, p })
}

impl CoeffTable {
    /// CSV with header `n,k,r,l,p`, one row per `n` in `1..=n_max`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,k,r,l,p\n");
        for n in 1..=self.n_max {
            let _ = writeln!(out, "{},{},{},{},{}", n, self.k, self.r[n], self.l[n], self.p[n]);
        }
        out
    }
}

/// Natural logarithm of a positive big integer, accurate to `f64` precision.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("fits in f64").ln() + shift as f64 * LN_2
}

/// `Δ_k(z) = 1 − 2z − (11+12k)z²`.
pub fn delta(k: f64, z: f64) -> f64 {
    1.0 - 2.0 * z - (11.0 + 12.0 * k) * z * z
}

/// `Δ'_k(z) = 1 − 2z − (11+16k)z²`.
pub fn delta_prime(k: f64, z: f64) -> f64 {
    1.0 - 2.0 * z - (11.0 + 16.0 * k) * z * z
}

/// Radii of convergence `(ρ_k, ρ'_k)`: the positive roots of `Δ_k` and `Δ'_k`.
pub fn radii(k: f64) -> (f64, f64) {
    let rho = (-1.0 + 2.0 * (3.0 + 3.0 * k).sqrt()) / (11.0 + 12.0 * k);
    let rho_prime = (-1.0 + 2.0 * (3.0 + 4.0 * k).sqrt()) / (11.0 + 16.0 * k);
    (rho, rho_prime)
}

/// `ln [zⁿ]R_k` from the square-root singularity at `ρ_k`:
/// `(3+3k)^{1/4} / (6√π) · ρ_k^{−n−1/2} · (n+1)^{−3/2}`.
pub fn ln_r_asymptotic(k: f64, n: f64) -> f64 {
    let (rho, _) = radii(k);
    0.25 * (3.0 + 3.0 * k).ln() - (6.0 * PI.sqrt()).ln() + (-n - 0.5) * rho.ln()
        - 1.5 * (n + 1.0).ln()
}

/// `ln [zⁿ]L_k` from the inverse-square-root singularity at `ρ_k`:
/// `k / (2√π (3+3k)^{1/4}) · ρ_k^{−n+1/2} · n^{−1/2}`.
pub fn ln_l_asymptotic(k: f64, n: f64) -> f64 {
    let (rho, _) = radii(k);
    k.ln() - (2.0 * PI.sqrt()).ln() - 0.25 * (3.0 + 3.0 * k).ln() + (-n + 0.5) * rho.ln()
        - 0.5 * n.ln()
}

/// `ln [zⁿ]P_k` as the sum of the contributions of both singularities:
/// `((3+3k)^{1/4} ρ_k^{−n−1/2} + (3+4k)^{1/4} ρ'_k^{−n−1/2}) / (2√π) · (n+1)^{−3/2}`.
pub fn ln_p_asymptotic(k: f64, n: f64) -> f64 {
    let (rho, rho_prime) = radii(k);
    let ln_a = 0.25 * (3.0 + 3.0 * k).ln() + (-n - 0.5) * rho.ln();
    let ln_b = 0.25 * (3.0 + 4.0 * k).ln() + (-n - 0.5) * rho_prime.ln();
    let hi = ln_a.max(ln_b);
    let sum = hi + ((ln_a - hi).exp() + (ln_b - hi).exp()).ln();
    sum - (2.0 * PI.sqrt()).ln() - 1.5 * (n + 1.0).ln()
}

/// Asymptotic average number of letters in an expression of size `n`:
/// `3kρ_k/√(3+3k) · (n+1)^{3/2} / n^{1/2}`.
pub fn average_letters(k: f64, n: f64) -> f64 {
    let (rho, _) = radii(k);
    3.0 * k * rho / (3.0 + 3.0 * k).sqrt() * (n + 1.0).powf(1.5) / n.sqrt()
}

/// Asymptotic estimates for one `(k, n)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticReport {
    pub k: u64,
    pub n: u64,
    pub rho: f64,
    pub rho_prime: f64,
    pub av_l: f64,
    /// `log₂ avP`; `avP` itself overflows `f64` for large `n`.
    pub av_p_log2: f64,
    /// `log₂(avP) / avL`, which tends to `log₂(4/3)`.
    pub ratio: f64,
    /// `avP^{1/avL}`, which tends to `4/3`.
    pub per_letter: f64,
}

impl AsymptoticReport {
    pub const CSV_HEADER: &'static str = "k,n,rho,rho_prime,avL,avP_log2,ratio,per_letter";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.k,
            self.n,
            self.rho,
            self.rho_prime,
            self.av_l,
            self.av_p_log2,
            self.ratio,
            self.per_letter
        )
    }
}

/// Evaluates the closed asymptotic forms at `(k, n)`.
///
/// # Panics
/// If `k` or `n` is zero.
pub fn asymptotics(k: u64, n: u64) -> AsymptoticReport {
    assert!(k >= 1 && n >= 1, "asymptotics need k >= 1 and n >= 1");
    let (kf, nf) = (k as f64, n as f64);
    let (rho, rho_prime) = radii(kf);
    let av_l = average_letters(kf, nf);
    let av_p_log2 = (ln_p_asymptotic(kf, nf) - ln_r_asymptotic(kf, nf)) / LN_2;
    let ratio = av_p_log2 / av_l;
    AsymptoticReport {
        k,
        n,
        rho,
        rho_prime,
        av_l,
        av_p_log2,
        ratio,
        per_letter: ratio.exp2(),
    }
}

/// Relative errors `|exact − asymptotic| / exact` for `[zⁿ]R_k` and
/// `[zⁿ]L_k`.
///
/// # Panics
/// If `n` is zero or beyond the table.
pub fn coefficient_asymptotic_agreement(table: &CoeffTable, n: usize) -> (f64, f64) {
    assert!(n >= 1 && n <= table.n_max);
    let (k, nf) = (table.k as f64, n as f64);
    let rel = |ln_asym: f64, exact: &BigUint| (1.0 - (ln_asym - ln_big(exact)).exp()).abs();
    (
        rel(ln_r_asymptotic(k, nf), &table.r[n]),
        rel(ln_l_asymptotic(k, nf), &table.l[n]),
    )
}

/// Every ∅-free expression of size exactly `n` over the arena's alphabet,
/// each exactly once.
pub fn enumerate_all(arena: &mut ExprArena, n: usize) -> Result<Vec<Expr>, CombinatoricsError> {
    enumerate_all_guarded(arena, n, DEFAULT_ENUMERATION_GUARD)
}

pub fn enumerate_all_guarded(
    arena: &mut ExprArena,
    n: usize,
    guard: u64,
) -> Result<Vec<Expr>, CombinatoricsError> {
    let k = arena.alphabet().len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let table = coefficients(k as u64, n)?;
    let total: BigUint = table.r.iter().sum();
    if total > BigUint::from(guard) {
        return Err(CombinatoricsError::EnumerationGuard {
            n,
            count: total.to_string(),
            guard,
        });
    }
    let mut levels: Vec<Vec<Expr>> = vec![Vec::new(); n + 1];
    let mut leaves = vec![arena.eps()];
    leaves.extend((0..k).map(|i| arena.sym(Symbol::from_index(i))));
    levels[1] = leaves;
    for size in 2..=n {
        let mut out = Vec::new();
        for i in 0..levels[size - 1].len() {
            let a = levels[size - 1][i];
            out.push(arena.star(a));
        }
        for left in 1..size - 1 {
            let right = size - 1 - left;
            for op in 0..3 {
                for &a in &levels[left] {
                    for &b in &levels[right] {
                        out.push(match op {
                            0 => arena.union(a, b),
                            1 => arena.concat(a, b),
                            _ => arena.shuffle(a, b),
                        });
                    }
                }
            }
        }
        levels[size] = out;
    }
    Ok(std::mem::take(&mut levels[n]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Alphabet;

    fn nums(v: &[BigUint]) -> Vec<u64> {
        v.iter().map(|x| x.to_u64().unwrap()).collect()
    }

    #[test]
    fn initial_terms() {
        let t = coefficients(2, 4).unwrap();
        assert_eq!(nums(&t.r), [0, 3, 3, 30, 84]);
        let t = coefficients(1, 4).unwrap();
        assert_eq!(nums(&t.r), [0, 2, 2, 14, 38]);
        assert_eq!(t.l[3], BigUint::from(13u32));
        assert_eq!(t.p[3], BigUint::from(14u32));
        assert_eq!((nums(&t.l)[1], nums(&t.p)[1]), (1, 1));
        let t = coefficients(7, 1).unwrap();
        assert_eq!(nums(&t.r), [0, 8]);
        assert_eq!(nums(&t.l), [0, 7]);
        assert_eq!(nums(&t.p), [0, 7]);
    }

    #[test]
    fn table_guards() {
        assert_eq!(coefficients(0, 3), Err(CombinatoricsError::ZeroAlphabet));
        assert!(matches!(coefficients(1, 0), Err(CombinatoricsError::TableSize { .. })));
        assert!(matches!(
            coefficients(1, MAX_TABLE_SIZE + 1),
            Err(CombinatoricsError::TableSize { .. })
        ));
    }

    #[test]
    fn csv_layout() {
        let csv = coefficients(2, 3).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,k,r,l,p");
        assert_eq!(lines.len(), 4);
        assert!(lines[3].starts_with("3,2,30,"));
    }

    #[test]
    fn small_enumerations() {
        let mut ar = ExprArena::new(Alphabet::standard(1));
        let one: Vec<String> = enumerate_all(&mut ar, 1)
            .unwrap()
            .into_iter()
            .map(|e| ar.pretty_print(e))
            .collect();
        assert_eq!(one, ["@", "a"]);
        let two: Vec<String> = enumerate_all(&mut ar, 2)
            .unwrap()
            .into_iter()
            .map(|e| ar.pretty_print(e))
            .collect();
        assert_eq!(two, ["@*", "a*"]);
        let mut ar = ExprArena::new(Alphabet::standard(2));
        assert_eq!(enumerate_all(&mut ar, 3).unwrap().len(), 30);
        assert!(matches!(
            enumerate_all_guarded(&mut ar, 6, 100),
            Err(CombinatoricsError::EnumerationGuard { .. })
        ));
    }

    #[test]
    fn radius_values() {
        let (rho2, _) = radii(2.0);
        assert!((rho2 - 1.0 / 7.0).abs() < 1e-12);
        let (_, rp1) = radii(1.0);
        assert!((rp1 - (-1.0 + 2.0 * 7f64.sqrt()) / 27.0).abs() < 1e-15);
        for k in [1.0, 2.0, 5.0, 10.0, 1e3, 1e6] {
            let (rho, rp) = radii(k);
            assert!(delta(k, rho).abs() < 1e-12);
            assert!(delta_prime(k, rp).abs() < 1e-12);
            assert!(0.0 < rp && rp < rho && rho < 1.0);
        }
    }

    #[test]
    fn ln_big_matches_f64() {
        let x = BigUint::from(10u32).pow(400);
        assert!((ln_big(&x) - 400.0 * 10f64.ln()).abs() < 1e-9);
        let x = BigUint::from(123456789u64);
        assert!((ln_big(&x) - 123456789f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn asymptotic_smoke() {
        let (er, el) = coefficient_asymptotic_agreement(&coefficients(2, 10).unwrap(), 10);
        assert!(er.is_finite() && el.is_finite());
        let rep = asymptotics(2, 10);
        assert!(rep.av_l.is_finite() && rep.av_p_log2.is_finite() && rep.ratio.is_finite());
        assert_eq!(AsymptoticReport::CSV_HEADER.split(',').count(), rep.csv_row().split(',').count());
    }
}
