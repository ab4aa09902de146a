//! The acceptance suite: ten criteria, each run against an independent
//! oracle or an exact recount. Reports contain no timings, so two runs with
//! the same seed produce identical output.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{factorize_u64, parse_ratio, ratio_to_f64, FactoredInteger, SmallestFactorSieve};
use crate::bounds::{
    alpha_closed_form, alpha_delta, alpha_delta_grid, alpha_feasible_f64, alpha_oracle, pr2_holds, prop1_bound,
    sandwich_holds,
};
use crate::error::Result;
use crate::sieve::{count_unsolvable, sieve_window_check, unsolvable_bruteforce};
use crate::split::{lemma1_check, split_transcript, SplitOutcome};
use crate::window::{count_window_sorted, gap_check, reflection_check, ExponentWindow};
use crate::witness::{build_witness, stirling_diagnostic};

/// `M` for the θ = 0.4, ε = 0.1 packing: the first success of the doubling
/// search `10^4 · 2^k` (here `k = 33`).
pub const WITNESS_M: u64 = 85_899_345_920_000;

pub const CRITERIA: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub status: Status,
    pub cases: u64,
    pub detail: String,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn line(&self) -> String {
        let s = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
        };
        format!("criterion {:>2} {:<22} {:<7} {}", self.id, self.name, s, self.detail)
    }
}

pub fn criterion_name(id: u32) -> &'static str {
    match id {
        1 => "lemma4-exactness",
        2 => "lemma1-property",
        3 => "alpha-oracle",
        4 => "alpha-delta-sandwich",
        5 => "split-pipeline",
        6 => "prop1-dominance",
        7 => "sieve-consistency",
        8 => "witness",
        9 => "elementary-facts",
        10 => "determinism",
        _ => "unknown",
    }
}

fn q(s: &str) -> BigRational {
    parse_ratio(s).expect("literal ratio")
}

fn result(id: u32, ok: bool, cases: u64, detail: String) -> CriterionResult {
    CriterionResult {
        id,
        name: criterion_name(id),
        status: if ok { Status::Pass } else { Status::Fail },
        cases,
        detail,
    }
}

fn failed(id: u32, e: crate::Error) -> CriterionResult {
    result(id, false, 0, format!("error: {e}"))
}

/// Smallest failing index, or `None`.
fn first_failure<F>(range: std::ops::RangeInclusive<u64>, f: F) -> Result<Option<u64>>
where
    F: Fn(u64) -> Result<bool> + Sync,
{
    let bad: Result<Vec<u64>> = range
        .into_par_iter()
        .map(|n| f(n).map(|ok| (!ok).then_some(n)))
        .filter_map(|r| r.transpose())
        .collect();
    Ok(bad?.into_iter().min())
}

fn outcome(id: u32, cases: u64, fail: Option<u64>, what: &str) -> CriterionResult {
    match fail {
        None => result(id, true, cases, format!("{cases} cases")),
        Some(n) => result(id, false, cases, format!("first failure at {what}={n}")),
    }
}

/// Criterion 1: closed-form count of unsolvable classes against brute force.
pub fn lemma4_exactness() -> CriterionResult {
    let mut cases = 0;
    for p in [3u64, 5, 7, 11, 13] {
        for v in 0..=4u32 {
            if p.pow(v + 1) > 1_000_000 {
                continue;
            }
            for u in 1..p as i64 {
                cases += 1;
                let same = count_unsolvable(p, v, u).and_then(|a| Ok(a == unsolvable_bruteforce(p, v, u)?));
                match same {
                    Ok(true) => {}
                    Ok(false) => return result(1, false, cases, format!("mismatch at p={p} v={v} u={u}")),
                    Err(e) => return failed(1, e),
                }
            }
        }
    }
    result(1, true, cases, format!("{cases} cases"))
}

/// Criterion 2: the lcm/gcd inequality on random tuples.
pub fn lemma1_property(seed: u64) -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases = 10_000u64;
    for c in 0..cases {
        let k = rng.gen_range(1..=6);
        let d: Vec<BigUint> = (0..k).map(|_| BigUint::from(rng.gen_range(1u64..=1_000_000))).collect();
        let t = rng.gen_range(-3i64..=5);
        match lemma1_check(&d, t) {
            Ok(true) => {}
            Ok(false) => {
                let ds: Vec<String> = d.iter().map(ToString::to_string).collect();
                return result(2, false, c + 1, format!("fails at d=[{}] t={t}", ds.join(",")));
            }
            Err(e) => return failed(2, e),
        }
    }
    result(2, true, cases, format!("{cases} cases"))
}

/// Criterion 3: closed-form α against bisection, plus maximality.
pub fn alpha_oracle_grid() -> CriterionResult {
    const GRID: u32 = 1000;
    let mut worst = 0.0f64;
    let mut cases = 0;
    for i in 1..=50i64 {
        let theta = BigRational::new(i.into(), 51.into());
        let sq = &theta * &theta;
        for j in 0..50i64 {
            let eta = &sq + (&theta - &sq) * BigRational::new(j.into(), 50.into());
            cases += 1;
            let a = match alpha_closed_form(&theta, &eta) {
                Ok(a) => a.to_f64(),
                Err(e) => return failed(3, e),
            };
            let (t, e) = (ratio_to_f64(&theta), ratio_to_f64(&eta));
            let dev = (a - alpha_oracle(t, e, GRID)).abs();
            worst = worst.max(dev);
            if dev > 1e-4 {
                return result(3, false, cases, format!("deviation {dev:.3e} at theta={theta} eta={eta}"));
            }
            if a < 1.0 && alpha_feasible_f64(t, e, a * (1.0 + 1e-3), GRID) {
                return result(3, false, cases, format!("alpha not maximal at theta={theta} eta={eta}"));
            }
        }
    }
    result(3, true, cases, format!("{cases} cases, max deviation {worst:.2e}"))
}

/// Criterion 4: `ξ-δ <= α(θ,η,δ) <= ξ` and the quadratic lower bound.
pub fn alpha_delta_sandwich() -> CriterionResult {
    let deltas: Vec<BigRational> = ["0.01", "0.05", "0.1", "0.5", "1"].iter().map(|s| q(s)).collect();
    let grid = alpha_delta_grid(20, &deltas);
    let cases = grid.len() as u64;
    let bad: Result<Vec<usize>> = grid
        .par_iter()
        .enumerate()
        .map(|(ix, (theta, eta, delta))| {
            let a = alpha_delta(theta, eta, delta)?;
            let lo = a.exact.lower_ratio(128)?;
            let ok = sandwich_holds(theta, eta, delta)? && pr2_holds(theta, eta, &a.epsilon_var, &lo, 1000);
            Ok((!ok).then_some(ix))
        })
        .filter_map(|r| r.transpose())
        .collect();
    match bad.map(|v| v.into_iter().min()) {
        Err(e) => failed(4, e),
        Ok(None) => result(4, true, cases, format!("{cases} cases")),
        Ok(Some(ix)) => {
            let (t, e, d) = &grid[ix];
            result(4, false, cases, format!("fails at theta={t} eta={e} delta={d}"))
        }
    }
}

/// `(θ, η)` pairs for the split pipeline.
pub fn split_grid() -> Vec<(BigRational, BigRational)> {
    [
        ("0.3", ["0.1", "0.2", "0.25"]),
        ("0.5", ["0.3", "0.4", "0.45"]),
        ("0.7", ["0.5", "0.6", "0.65"]),
    ]
    .iter()
    .flat_map(|(t, es)| es.iter().map(move |e| (q(t), q(e))))
    .collect()
}

/// Criterion 5: every split on `n <= limit` with `τ(n) >= 3`.
pub fn split_pipeline(limit: u64) -> CriterionResult {
    let sieve = SmallestFactorSieve::new(limit as u32);
    let grid = split_grid();
    let splits = std::sync::atomic::AtomicU64::new(0);
    let fail = first_failure(2..=limit, |n| {
        let f = FactoredInteger::from_sieve(n as u32, &sieve);
        if f.tau() < BigUint::from(3u32) {
            return Ok(true);
        }
        for (theta, eta) in &grid {
            let t = split_transcript(&f, theta, eta)?;
            if matches!(t.outcome, SplitOutcome::Split(_)) {
                splits.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            }
            if !t.passed() {
                return Ok(false);
            }
        }
        Ok(true)
    });
    match fail {
        Err(e) => failed(5, e),
        Ok(None) => {
            let s = splits.into_inner();
            result(5, true, s, format!("n <= {limit}, {} pairs, {s} splits checked", grid.len()))
        }
        Ok(Some(n)) => result(5, false, 0, format!("first failure at n={n}")),
    }
}

/// `(θ, ε)` pairs for the small-window dominance check.
pub fn prop1_grid() -> Vec<(BigRational, BigRational)> {
    [
        ("0.3", ["0.01", "0.03", "0.05"]),
        ("0.5", ["0.05", "0.1", "0.15"]),
        ("0.7", ["0.09", "0.19", "0.29"]),
    ]
    .iter()
    .flat_map(|(t, es)| es.iter().map(move |e| (q(t), q(e))))
    .collect()
}

/// Criterion 6: `D_n(n^θ, n^(θ²-ε)) <= prop1_bound(θ, ε)`.
pub fn prop1_dominance(limit: u64) -> CriterionResult {
    let sieve = SmallestFactorSieve::new(limit as u32);
    let cases: Result<Vec<(ExponentWindow, BigRational)>> = prop1_grid()
        .into_iter()
        .map(|(t, e)| {
            let cap = prop1_bound(&t, &e)?;
            let eta = &t * &t - &e;
            Ok((ExponentWindow::exponent(t, eta)?, cap))
        })
        .collect();
    let cases = match cases {
        Ok(c) => c,
        Err(e) => return failed(6, e),
    };
    let fail = first_failure(1..=limit, |n| {
        let f = FactoredInteger::from_sieve(n as u32, &sieve);
        let divs = f.divisors_u64()?.unwrap_or_default();
        let nb = BigUint::from(n);
        for (w, cap) in &cases {
            let c = count_window_sorted(&nb, &divs, w)?;
            if BigRational::from_integer(c.into()) > *cap {
                return Ok(false);
            }
        }
        Ok(true)
    });
    match fail {
        Err(e) => failed(6, e),
        Ok(f) => {
            let mut r = outcome(6, limit * cases.len() as u64, f, "n");
            if r.passed() {
                r.detail = format!("n <= {limit}, {} pairs", cases.len());
            }
            r
        }
    }
}

/// Criterion 7: sieve window reports on random samples.
pub fn sieve_consistency(seed: u64) -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = 1000u64;
    let mut drawn = Vec::with_capacity(samples as usize);
    while (drawn.len() as u64) < samples {
        let n = rng.gen_range(1u64..=1_000_000);
        let a = rng.gen_range(1u64..=10);
        let b = rng.gen_range(1u64..=10);
        let i = rng.gen_range(1u64..=10);
        let qq = rng.gen_range(1u64..=50);
        if num_integer::gcd(a, b) == 1 {
            drawn.push((n, a, b, i, qq));
        }
    }
    let bad: Result<Vec<usize>> = drawn
        .par_iter()
        .enumerate()
        .map(|(ix, &(n, a, b, i, qq))| {
            let r = sieve_window_check(&factorize_u64(n)?, a, b, i, qq)?;
            Ok((!r.passed()).then_some(ix))
        })
        .filter_map(|r| r.transpose())
        .collect();
    match bad.map(|v| v.into_iter().min()) {
        Err(e) => failed(7, e),
        Ok(None) => result(7, true, samples, format!("{samples} samples")),
        Ok(Some(ix)) => {
            let (n, a, b, i, qq) = drawn[ix];
            result(7, false, samples, format!("fails at n={n} a={a} b={b} i={i} Q={qq}"))
        }
    }
}

/// Criterion 8: the frozen packing at θ = 0.4, ε = 0.1.
pub fn witness_packing() -> CriterionResult {
    let (theta, eps) = (q("0.4"), q("0.1"));
    let rep = match build_witness(&theta, &eps, &BigUint::from(WITNESS_M)) {
        Ok(r) => r,
        Err(e) => return failed(8, e),
    };
    let stirling = stirling_diagnostic(rep.s, rep.r, &theta, &eps)
        .map(|d| format!("{:.4}", d.closed_form))
        .unwrap_or_default();
    let ok = rep.success && rep.packed_count == 20 && rep.m_extremal && rep.product_size_holds && rep.r_bound_holds;
    result(
        8,
        ok,
        rep.binom_target,
        format!(
            "M={} s={} r={} packed {}/{} (closed-form size estimate {stirling})",
            rep.big_m, rep.s, rep.r, rep.packed_count, rep.binom_target
        ),
    )
}

fn reflection_windows(n: u64) -> Vec<(BigRational, BigRational)> {
    let r = |a: u64, b: u64| BigRational::new(a.into(), b.into());
    let mut out = vec![(r(n, 3), r(n, 5)), (r(n, 2), r(n, 2)), (r(n + 1, 7), r(1, 7))];
    for x in [1u64, 2, 5, 10] {
        for y in [0u64, 1, 3] {
            if y <= x {
                out.push((r(x, 1), r(y, 1)));
            }
        }
    }
    out
}

/// Criterion 9: reflection for `n <= reflect_limit`, gaps for `n <= gap_limit`.
pub fn elementary_facts(reflect_limit: u64, gap_limit: u64) -> CriterionResult {
    let sieve = SmallestFactorSieve::new(gap_limit.max(reflect_limit) as u32);
    let refl = first_failure(1..=reflect_limit, |n| {
        let f = FactoredInteger::from_sieve(n as u32, &sieve);
        for (x, y) in reflection_windows(n) {
            if !reflection_check(&f, &x, &y)? {
                return Ok(false);
            }
        }
        Ok(true)
    });
    let gaps = first_failure(1..=gap_limit, |n| gap_check(&FactoredInteger::from_sieve(n as u32, &sieve)));
    match (refl, gaps) {
        (Err(e), _) | (_, Err(e)) => failed(9, e),
        (Ok(Some(n)), _) => result(9, false, 0, format!("reflection fails at n={n}")),
        (_, Ok(Some(n))) => result(9, false, 0, format!("gap check fails at n={n}")),
        (Ok(None), Ok(None)) => result(
            9,
            true,
            reflect_limit + gap_limit,
            format!("reflection n <= {reflect_limit}, gaps n <= {gap_limit}"),
        ),
    }
}

/// Runs one of criteria 1 to 9. Criterion 10 compares two full runs and
/// lives with the binary.
pub fn run_criterion(id: u32, seed: u64) -> Option<CriterionResult> {
    Some(match id {
        1 => lemma4_exactness(),
        2 => lemma1_property(seed),
        3 => alpha_oracle_grid(),
        4 => alpha_delta_sandwich(),
        5 => split_pipeline(100_000),
        6 => prop1_dominance(1_000_000),
        7 => sieve_consistency(seed),
        8 => witness_packing(),
        9 => elementary_facts(10_000, 100_000),
        _ => return None,
    })
}

/// Criteria 1 to 9 in order. Once `budget` has elapsed the remaining
/// criteria are reported as skipped.
pub fn run_all(seed: u64, budget: Option<Duration>) -> Vec<CriterionResult> {
    let start = Instant::now();
    (1..CRITERIA)
        .map(|id| {
            if budget.is_some_and(|b| start.elapsed() > b) {
                return CriterionResult {
                    id,
                    name: criterion_name(id),
                    status: Status::Skipped,
                    cases: 0,
                    detail: "time budget exhausted".into(),
                };
            }
            run_criterion(id, seed).expect("criterion id in range")
        })
        .collect()
}

/// Renders a report; byte-identical for identical results.
pub fn render(results: &[CriterionResult]) -> String {
    let mut s = String::new();
    for r in results {
        s.push_str(&r.line());
        s.push('\n');
    }
    let passed = results.iter().filter(|r| r.passed()).count();
    s.push_str(&format!("{passed}/{} criteria passed\n", results.len()));
    s
}
