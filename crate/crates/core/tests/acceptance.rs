//! Acceptance checks, one line per criterion. Exits non-zero if any fails.

mod common;

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;

use common::draw;
use num_bigint::BigUint;
use rayon::prelude::*;
use shuffle_pd::automaton::build_apd;
use shuffle_pd::combinatorics::{asymptotics, coefficients, enumerate_all, radii};
use shuffle_pd::derive::{check_support, closure, p_upper, pi, pi_count, pi_len, DEFAULT_STATE_BUDGET};
use shuffle_pd::lang_oracle::{bounded_language, OracleConfig};
use shuffle_pd::sampler::{run_stats, sample_rng, Sampler};
use shuffle_pd::{Alphabet, ExprArena, Word};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn worst_case_family() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for n in 1..=12 {
        let mut ar = ExprArena::new(Alphabet::standard(n));
        let e = ar.shuffle_chain(n);
        let states = build_apd(&mut ar, e, DEFAULT_STATE_BUDGET).unwrap().state_count();
        let support = pi_len(&mut ar, e);
        if states != 1 << n || support != (1 << n) - 1 {
            bad.push(format!("n={n}: {states} states, |pi|={support}"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        bad.is_empty() && secs < 30.0,
        format!("n=1..12, {secs:.2}s (limit 30s) {}", bad.join("; ")),
    )
}

fn support_bound() -> Outcome {
    const SAMPLES: u64 = 10_000;
    let mut violations = 0u64;
    let mut lines = Vec::new();
    for k in [1u64, 2, 5, 10] {
        for n in [20usize, 50, 100] {
            let sampler = Sampler::new(k, n).unwrap();
            let alphabet = Alphabet::standard(k as usize);
            let (v, max) = (0..SAMPLES)
                .into_par_iter()
                .map(|i| {
                    let mut ar = ExprArena::new(alphabet.clone());
                    let e = sampler.sample(&mut ar, n, &mut sample_rng(SEED, i));
                    let size = pi_count(&mut ar, e);
                    let bound = (BigUint::from(1u32) << ar.width(e)) - 1u32;
                    (u64::from(BigUint::from(size) > bound), size)
                })
                .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1.max(b.1)));
            violations += v;
            lines.push(format!("k={k},n={n}: max |pi|={max}"));
        }
    }
    outcome(
        violations == 0,
        format!("{SAMPLES} samples per configuration, {violations} violations; {}", lines.join(", ")),
    )
}

fn proper_derivatives() -> Outcome {
    const SAMPLES: u64 = 1_000;
    let bad: u64 = (0..SAMPLES)
        .into_par_iter()
        .map(|i| {
            let (k, n) = (1 + (i % 3) as usize, 1 + (i % 40) as usize);
            let (mut ar, e) = draw(k, n, SEED, i);
            let c = closure(&mut ar, e, DEFAULT_STATE_BUDGET).unwrap();
            u64::from(c.proper != pi(&mut ar, e))
        })
        .sum();
    outcome(bad == 0, format!("{SAMPLES} samples, size <= 40, k <= 3, {bad} violations"))
}

fn language_correctness() -> Outcome {
    const SAMPLES: u64 = 500;
    let cfg = OracleConfig::default();
    let bad: Vec<String> = (0..SAMPLES)
        .into_par_iter()
        .filter_map(|i| {
            let (k, n) = (1 + (i % 3) as usize, 1 + (i % 15) as usize);
            let (mut ar, e) = draw(k, n, SEED + 1, i);
            let nfa = build_apd(&mut ar, e, DEFAULT_STATE_BUDGET).unwrap();
            let lang = bounded_language(&ar, e, 8, &cfg).unwrap();
            let words_ok = Word::all_up_to(ar.alphabet(), 8)
                .iter()
                .all(|w| nfa.accepts(w) == lang.contains(w));
            let states_ok = (0..nfa.state_count())
                .all(|s| nfa.right_language_check(&ar, s, 5, &cfg).unwrap());
            (!(words_ok && states_ok)).then(|| ar.pretty_print(e))
        })
        .collect();
    outcome(
        bad.is_empty(),
        format!("{SAMPLES} samples, size <= 15, words <= 8, right languages at 5, {} failures", bad.len()),
    )
}

fn support_property() -> Outcome {
    const SAMPLES: u64 = 200;
    let cfg = OracleConfig::default();
    let bad: u64 = (0..SAMPLES)
        .into_par_iter()
        .map(|i| {
            let (k, n) = (1 + (i % 3) as usize, 1 + (i % 12) as usize);
            let (mut ar, e) = draw(k, n, SEED + 2, i);
            u64::from(!check_support(&mut ar, e, 5, &cfg).unwrap())
        })
        .sum();
    outcome(bad == 0, format!("{SAMPLES} samples, size <= 12, length 5, {bad} failures"))
}

fn coefficient_exactness() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for k in 1..=2usize {
        let table = coefficients(k as u64, 9).unwrap();
        let mut ar = ExprArena::new(Alphabet::standard(k));
        for n in 1..=9 {
            let all = enumerate_all(&mut ar, n).unwrap();
            let r = BigUint::from(all.len());
            let l = BigUint::from(all.iter().map(|&e| ar.width(e)).sum::<u64>());
            let p: BigUint = all.iter().map(|&e| p_upper(&ar, e)).sum();
            if (r, l, p) != (table.r[n].clone(), table.l[n].clone(), table.p[n].clone()) {
                bad.push(format!("k={k},n={n}"));
            }
        }
    }
    let t1 = coefficients(1, 3).unwrap();
    let t2 = coefficients(2, 3).unwrap();
    let anchors = t2.r[3] == BigUint::from(30u32)
        && t1.l[3] == BigUint::from(13u32)
        && t1.p[3] == BigUint::from(14u32);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        bad.is_empty() && anchors && secs < 120.0,
        format!(
            "k <= 2, n <= 9, anchors r3(k=2)={} l3(k=1)={} p3(k=1)={}, {secs:.2}s (limit 120s) {}",
            t2.r[3],
            t1.l[3],
            t1.p[3],
            bad.join(" ")
        ),
    )
}

fn radius_anchor() -> Outcome {
    let err = (radii(2.0).0 - 1.0 / 7.0).abs();
    outcome(err < 1e-12, format!("|rho_2 - 1/7| = {err:.3e} (tolerance 1e-12)"))
}

fn asymptotic_limit() -> Outcome {
    let target = (4.0f64 / 3.0).log2();
    let gaps: Vec<(u64, f64, f64)> = [100u64, 10_000, 1_000_000]
        .iter()
        .map(|&k| {
            let ratio = asymptotics(k, 100_000_000).ratio;
            (k, ratio, (ratio - target).abs())
        })
        .collect();
    let monotone = gaps.windows(2).all(|w| w[1].2 < w[0].2);
    let last = gaps[2].2;
    let listing: Vec<String> = gaps.iter().map(|(k, r, _)| format!("k={k}: {r:.6}")).collect();
    outcome(
        monotone && last < 0.01,
        format!(
            "n=1e8, {} (target {target:.6}, tolerance 0.01, monotone: {monotone})",
            listing.join(", ")
        ),
    )
}

fn stats_consistency() -> Outcome {
    let mut bad = Vec::new();
    let configs = [(1u64, 20usize), (1, 50), (2, 20), (2, 50), (5, 20), (5, 50), (10, 20), (10, 50)];
    for (k, n) in configs {
        let a = run_stats(k, n, 1_000, SEED, 200_000).unwrap();
        let b = run_stats(k, n, 1_000, SEED, 200_000).unwrap();
        let bounded = a.mean_states <= a.bound_worst && a.mean_pi <= a.bound_pi;
        let same = a.csv_row() == b.csv_row()
            && a.mean_states.to_bits() == b.mean_states.to_bits()
            && a.mean_pi.to_bits() == b.mean_pi.to_bits();
        if !(bounded && same) {
            bad.push(format!("k={k},n={n}"));
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} runs of 1000 samples, repeated with the same seed {}", configs.len(), bad.join(" ")),
    )
}

fn sampler_uniformity() -> Outcome {
    const DRAWS: u64 = 38_000;
    let mut ar = ExprArena::new(Alphabet::standard(1));
    let class = enumerate_all(&mut ar, 4).unwrap();
    let sampler = Sampler::new(1, 4).unwrap();
    let mut counts: HashMap<_, u64> = class.iter().map(|&e| (e, 0)).collect();
    let mut rng = sample_rng(SEED, 0);
    for _ in 0..DRAWS {
        *counts.get_mut(&sampler.sample(&mut ar, 4, &mut rng)).unwrap() += 1;
    }
    let expected = DRAWS as f64 / class.len() as f64;
    let stat: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p = 1.0 - ChiSquared::new((class.len() - 1) as f64).unwrap().cdf(stat);
    outcome(
        class.len() == 38 && p > 0.001,
        format!("{} outcomes, {DRAWS} draws, chi2 = {stat:.2}, p = {p:.4} (significance 0.001)", class.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("worst-case family", worst_case_family),
        ("support size bound", support_bound),
        ("proper derivatives equal the support", proper_derivatives),
        ("language correctness", language_correctness),
        ("support property", support_property),
        ("coefficient exactness", coefficient_exactness),
        ("radius anchor", radius_anchor),
        ("asymptotic limit", asymptotic_limit),
        ("experiment bound consistency", stats_consistency),
        ("sampler uniformity", sampler_uniformity),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        failed += usize::from(!out.pass);
        println!(
            "criterion {:>2} {} {name}: {} [{:.1}s]",
            i + 1,
            if out.pass { "PASS" } else { "FAIL" },
            out.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
