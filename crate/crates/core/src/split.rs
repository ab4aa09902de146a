//! Splitting `n = ab` so that `b` carries few divisors and the cofactor `a`
//! sees only windows of the small-interval type.
//!
//! All logarithmic quantities reduce to sums of `ln p` and `ln(β+1)`, so
//! `ln n` and `ln τ(n)` are assembled from the same enclosures as the
//! prefix sums they normalize. At a full prefix both normalized sums equal
//! one exactly; that case is decided structurally, not numerically.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::power::{ceil_div, RationalPower};
use crate::arith::{certainly, default_precision, escalate, ln_integer, FactoredInteger, HighPrecisionReal};
use crate::bounds::{alpha_delta_interval, xi, Candidate};
use crate::error::{argument, Error, Result};
use crate::window::{integer_window, ExponentWindow};

/// Exact check of `[d]^(t(t+1)/2) · ∏_{i<j} (d_i, d_j) >= ∏ d_i^t`.
pub fn lemma1_check(d: &[BigUint], t: i64) -> Result<bool> {
    if d.is_empty() || d.iter().any(|x| x.is_zero()) {
        return Err(argument("lemma1_check needs a nonempty list of positive integers"));
    }
    let lcm = d.iter().fold(BigUint::one(), |acc, x| acc.lcm(x));
    let mut gcds = BigUint::one();
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            gcds *= d[i].gcd(&d[j]);
        }
    }
    let prod: BigUint = d.iter().product();
    let e = t * (t + 1) / 2;
    let e = u32::try_from(e).map_err(|_| argument("exponent t(t+1)/2 too large"))?;
    let t_abs = u32::try_from(t.unsigned_abs()).map_err(|_| argument("t too large"))?;
    let left = lcm.pow(e) * gcds;
    Ok(if t >= 0 {
        left >= prod.pow(t_abs)
    } else {
        // Multiply through by ∏ d_i^|t|.
        left * prod.pow(t_abs) >= BigUint::one()
    })
}

/// Order in which every prefix keeps `Σx <= Σy`: indices with `x_i <= y_i`
/// first, then the rest, each group in input order. `nondeficient(i)`
/// reports `x_i <= y_i`.
fn order_by(k: usize, mut nondeficient: impl FnMut(usize) -> Result<bool>) -> Result<Vec<usize>> {
    let mut first = Vec::with_capacity(k);
    let mut rest = Vec::new();
    for i in 0..k {
        if nondeficient(i)? {
            first.push(i);
        } else {
            rest.push(i);
        }
    }
    first.extend(rest);
    Ok(first)
}

/// A permutation of `pairs` whose every prefix satisfies `Σx <= Σy`.
pub fn lemma2_order(pairs: &[(BigRational, BigRational)]) -> Result<Vec<usize>> {
    let sx: BigRational = pairs.iter().map(|p| &p.0).sum();
    let sy: BigRational = pairs.iter().map(|p| &p.1).sum();
    if sx > sy {
        return Err(argument("lemma2_order needs sum(x) <= sum(y)"));
    }
    order_by(pairs.len(), |i| Ok(pairs[i].0 <= pairs[i].1))
}

/// Whether every prefix of `order` satisfies `Σx <= Σy`.
pub fn prefix_property(pairs: &[(BigRational, BigRational)], order: &[usize]) -> bool {
    let mut acc = BigRational::zero();
    order.iter().all(|&i| {
        acc += &pairs[i].1 - &pairs[i].0;
        !acc.is_negative()
    })
}

/// Logarithms behind the pairs `(ρ_i, θ_i)`, at one precision.
struct LogData {
    /// `ln(β_i + 1)`.
    ln_mult: Vec<HighPrecisionReal>,
    /// `β_i ln p_i`.
    ln_power: Vec<HighPrecisionReal>,
    ln_tau: HighPrecisionReal,
    ln_n: HighPrecisionReal,
}

impl LogData {
    fn new(n: &FactoredInteger, bits: u32) -> Result<Self> {
        let mut ln_mult = Vec::new();
        let mut ln_power = Vec::new();
        for pp in n.factors() {
            ln_mult.push(ln_integer(&BigUint::from(pp.exponent + 1), bits)?);
            ln_power.push(ln_integer(&pp.prime, bits)?.mul_int(&pp.exponent.into()));
        }
        let zero = HighPrecisionReal::zero(bits);
        let ln_tau = ln_mult.iter().fold(zero.clone(), |acc, x| &acc + x);
        let ln_n = ln_power.iter().fold(zero, |acc, x| &acc + x);
        Ok(LogData { ln_mult, ln_power, ln_tau, ln_n })
    }

    /// `ρ_i <= θ_i`, i.e. `ln(β+1)·ln n <= β ln p · ln τ`.
    fn nondeficient(&self, i: usize, single: bool) -> Result<bool> {
        if single {
            return Ok(true);
        }
        certainly((&self.ln_mult[i] * &self.ln_n).le(&(&self.ln_power[i] * &self.ln_tau)))
    }
}

/// The pairs `(ρ_i, θ_i)` with `β_i + 1 = τ(n)^ρ_i` and `p_i^β_i = n^θ_i`.
#[derive(Clone, Debug, Serialize)]
pub struct PairSequence {
    #[serde(serialize_with = "serialize_pairs")]
    pub pairs: Vec<(HighPrecisionReal, HighPrecisionReal)>,
    #[serde(serialize_with = "crate::report::decimal")]
    pub source: BigUint,
}

fn serialize_pairs<S: serde::Serializer>(
    v: &[(HighPrecisionReal, HighPrecisionReal)],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for (r, t) in v {
        seq.serialize_element(&[r.to_decimal_string(30), t.to_decimal_string(30)])?;
    }
    seq.end()
}

pub fn pair_sequence(n: &FactoredInteger) -> Result<PairSequence> {
    if n.is_one() {
        return Err(argument("pair_sequence needs n > 1"));
    }
    let logs = LogData::new(n, default_precision())?;
    let pairs = logs
        .ln_mult
        .iter()
        .zip(&logs.ln_power)
        .map(|(m, p)| Ok((m.div(&logs.ln_tau)?, p.div(&logs.ln_n)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PairSequence {
        pairs,
        source: n.value().clone(),
    })
}

/// A split `n = ab` with `b` the product of the first `s` prime powers in
/// `permutation` (indices into the factorization of `n`).
#[derive(Clone, Debug, Serialize)]
pub struct SplitResult {
    pub a: FactoredInteger,
    pub b: FactoredInteger,
    pub s: usize,
    #[serde(serialize_with = "crate::report::real")]
    pub alpha_used: HighPrecisionReal,
    pub candidate: Candidate,
    #[serde(serialize_with = "crate::report::real")]
    pub delta: HighPrecisionReal,
    pub permutation: Vec<usize>,
    #[serde(serialize_with = "crate::report::ratio")]
    pub theta: BigRational,
    #[serde(serialize_with = "crate::report::ratio")]
    pub eta: BigRational,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum SplitOutcome {
    Split(Box<SplitResult>),
    /// `δ >= ξ(θ,η)`: the bound is trivial.
    TrivialRegime,
    /// `η < θ² - (θ(1-θ))²δ`: the small-interval cap applies directly.
    Proposition1Regime,
}

impl SplitOutcome {
    pub fn split(&self) -> Option<&SplitResult> {
        match self {
            SplitOutcome::Split(s) => Some(s),
            _ => None,
        }
    }
}

/// The split of `n` for the window `(n^θ, n^η)`, with `δ = 1/ln τ(n)`.
pub fn theorem1_split(n: &FactoredInteger, theta: &BigRational, eta: &BigRational) -> Result<SplitOutcome> {
    let x = xi(theta, eta)?.value;
    if n.tau() < BigUint::from(3u32) {
        return Err(argument("theorem1_split needs tau(n) >= 3"));
    }
    let w = theta * (BigRational::one() - theta);
    let w2 = &w * &w;
    let k = n.factors().len();
    let single = k == 1;
    escalate(|bits| {
        let q = |r: &BigRational| HighPrecisionReal::from_ratio(r, bits);
        let logs = LogData::new(n, bits)?;
        // δ >= ξ  <=>  ξ ln τ <= 1.
        if certainly((&q(&x) * &logs.ln_tau).le(&HighPrecisionReal::one(bits)))? {
            return Ok(SplitOutcome::TrivialRegime);
        }
        // η < θ² - w²δ  <=>  (θ² - η) ln τ > w².
        let gap = theta * theta - eta;
        if certainly((&q(&gap) * &logs.ln_tau).gt(&q(&w2)))? {
            return Ok(SplitOutcome::Proposition1Regime);
        }
        let delta = logs.ln_tau.recip()?;
        let (alpha, candidate) = alpha_delta_interval(theta, eta, &delta)?;
        let permutation = order_by(k, |i| logs.nondeficient(i, single))?;
        // Minimal s with Σ_{i<=s} θ_σi >= 1 - α, i.e. ln b_s >= (1-α) ln n.
        // The full product always qualifies since α > 0.
        let target = &(&HighPrecisionReal::one(bits) - &alpha) * &logs.ln_n;
        let mut acc = HighPrecisionReal::zero(bits);
        let mut s = k;
        for (pos, &i) in permutation.iter().enumerate().take(k - 1) {
            acc = &acc + &logs.ln_power[i];
            if certainly(acc.ge(&target))? {
                s = pos + 1;
                break;
            }
        }
        let b = n.sub_product(&permutation[..s]);
        let rest: Vec<usize> = permutation[s..].to_vec();
        let a = n.sub_product(&rest);
        Ok(SplitOutcome::Split(Box::new(SplitResult {
            a,
            b,
            s,
            alpha_used: alpha,
            candidate,
            delta,
            permutation,
            theta: theta.clone(),
            eta: eta.clone(),
        })))
    })
}

/// Checks the structural invariants of a split: `ab = n`, coprimality,
/// the prefix property of the permutation, and minimality of `s`.
pub fn split_invariants(split: &SplitResult, n: &FactoredInteger) -> Result<bool> {
    if split.a.value() * split.b.value() != *n.value() || !split.a.value().gcd(split.b.value()).is_one() {
        return Ok(false);
    }
    let k = n.factors().len();
    let mut sorted = split.permutation.clone();
    sorted.sort_unstable();
    if sorted != (0..k).collect::<Vec<_>>() || split.s == 0 || split.s > k {
        return Ok(false);
    }
    let expect_b = n.sub_product(&split.permutation[..split.s]);
    if expect_b.value() != split.b.value() {
        return Ok(false);
    }
    escalate(|bits| {
        let logs = LogData::new(n, bits)?;
        let (alpha, _) = alpha_delta_interval(&split.theta, &split.eta, &logs.ln_tau.recip()?)?;
        // Prefix property Σρ <= Σθ, cross-multiplied; the full prefix ties.
        let mut sr = HighPrecisionReal::zero(bits);
        let mut st = HighPrecisionReal::zero(bits);
        for &i in &split.permutation[..k - 1] {
            sr = &sr + &logs.ln_mult[i];
            st = &st + &logs.ln_power[i];
            if !certainly((&sr * &logs.ln_n).le(&(&st * &logs.ln_tau)))? {
                return Ok(false);
            }
        }
        let target = &(&HighPrecisionReal::one(bits) - &alpha) * &logs.ln_n;
        let prefix = |len: usize| {
            split.permutation[..len]
                .iter()
                .fold(HighPrecisionReal::zero(bits), |acc, &i| &acc + &logs.ln_power[i])
        };
        let before = certainly(prefix(split.s - 1).lt(&target))?;
        let reached = split.s == k || certainly(prefix(split.s).ge(&target))?;
        Ok(before && reached)
    })
}

/// `τ(b) <= 2 V(n) τ(n)^(1-α)`, certified.
pub fn tau_b_check(split: &SplitResult, n: &FactoredInteger) -> Result<bool> {
    let tau_b = split.b.tau();
    let two_v = BigUint::from(2 * n.v_max());
    // τ(n)^(1-α) >= 1 since α <= ξ <= 1.
    if tau_b <= two_v {
        return Ok(true);
    }
    escalate(|bits| {
        let logs = LogData::new(n, bits)?;
        let (alpha, _) = alpha_delta_interval(&split.theta, &split.eta, &logs.ln_tau.recip()?)?;
        let left = &ln_integer(&tau_b, bits)? - &ln_integer(&two_v, bits)?;
        let right = &(&HighPrecisionReal::one(bits) - &alpha) * &logs.ln_tau;
        certainly(left.le(&right))
    })
}

fn divisors_in(divs: &[BigUint], lo: &BigUint, hi: &BigUint) -> u64 {
    if lo > hi {
        return 0;
    }
    let a = divs.partition_point(|d| d < lo);
    let b = divs.partition_point(|d| d <= hi);
    (b - a) as u64
}

/// Outcome of checking `D_n(X,Y) = Σ_{e|b} D_a(X/e, Y/e)` for one split.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DidCheck {
    pub direct: u64,
    pub summed: u64,
    /// Divisors `e | b` with `e > Y` or `X/e > a/2`.
    pub guarded: u64,
    /// Whether every guarded term had `D_a(X/e, Y/e) <= 1`.
    pub guards_hold: bool,
}

impl DidCheck {
    pub fn holds(&self) -> bool {
        self.direct == self.summed && self.guards_hold
    }
}

/// `d ∈ [X/e, (X+Y)/e]` for an integer `d` iff `d ∈ [⌈⌈X⌉/e⌉, ⌊⌊X+Y⌋/e⌋]`.
pub fn did_check(n: &FactoredInteger, split: &SplitResult, w: &ExponentWindow) -> Result<DidCheck> {
    let (lo, hi) = integer_window(n.value(), w)?;
    let n_divs = n.divisors()?;
    let direct = divisors_in(&n_divs, &lo, &hi);
    let a_divs = split.a.divisors()?;
    let b_divs = split.b.divisors()?;
    let (x, y) = match w {
        ExponentWindow::Exponent { theta, eta } => (
            RealPoint::Power(RationalPower::new(n.value(), theta)?),
            RealPoint::Power(RationalPower::new(n.value(), eta)?),
        ),
        ExponentWindow::Absolute { x, y } => (RealPoint::Ratio(x.clone()), RealPoint::Ratio(y.clone())),
    };
    let mut summed = 0;
    let mut guarded = 0;
    let mut guards_hold = true;
    for e in &b_divs {
        let c = divisors_in(&a_divs, &ceil_div(&lo, e), &(&hi / e));
        summed += c;
        let half_ae = BigRational::new((split.a.value() * e).into(), 2.into());
        if y.less_than(&BigRational::from_integer(e.clone().into()))? || x.greater_than(&half_ae)? {
            guarded += 1;
            guards_hold &= c <= 1;
        }
    }
    Ok(DidCheck {
        direct,
        summed,
        guarded,
        guards_hold,
    })
}

enum RealPoint {
    Power(RationalPower),
    Ratio(BigRational),
}

impl RealPoint {
    fn cmp_with(&self, r: &BigRational, greater: bool) -> Result<bool> {
        match self {
            RealPoint::Ratio(v) => Ok(if greater { v > r } else { v < r }),
            RealPoint::Power(p) => {
                if let Some(v) = p.exact() {
                    let v = BigRational::from_integer(v.clone().into());
                    return Ok(if greater { &v > r } else { &v < r });
                }
                escalate(|bits| {
                    let iv = p.interval(bits)?;
                    let rv = HighPrecisionReal::from_ratio(r, bits);
                    certainly(if greater { iv.gt(&rv) } else { iv.lt(&rv) })
                })
            }
        }
    }

    fn greater_than(&self, r: &BigRational) -> Result<bool> {
        self.cmp_with(r, true)
    }

    fn less_than(&self, r: &BigRational) -> Result<bool> {
        self.cmp_with(r, false)
    }
}

/// JSON-ready record of one split run.
#[derive(Clone, Debug, Serialize)]
pub struct SplitTranscript {
    #[serde(serialize_with = "crate::report::decimal")]
    pub n: BigUint,
    #[serde(serialize_with = "crate::report::ratio")]
    pub theta: BigRational,
    #[serde(serialize_with = "crate::report::ratio")]
    pub eta: BigRational,
    pub outcome: SplitOutcome,
    pub tau_b: String,
    pub bound: Option<f64>,
    pub tau_b_check: Option<bool>,
    pub invariants: Option<bool>,
    pub did: Option<DidCheck>,
}

impl SplitTranscript {
    pub fn passed(&self) -> bool {
        self.tau_b_check != Some(false) && self.invariants != Some(false) && self.did.as_ref().is_none_or(DidCheck::holds)
    }
}

/// Runs the split and every check on it.
pub fn split_transcript(n: &FactoredInteger, theta: &BigRational, eta: &BigRational) -> Result<SplitTranscript> {
    let outcome = theorem1_split(n, theta, eta)?;
    let mut t = SplitTranscript {
        n: n.value().clone(),
        theta: theta.clone(),
        eta: eta.clone(),
        outcome: outcome.clone(),
        tau_b: String::new(),
        bound: None,
        tau_b_check: None,
        invariants: None,
        did: None,
    };
    if let Some(s) = outcome.split() {
        t.tau_b = s.b.tau().to_string();
        let tau = n.tau().to_f64().unwrap_or(f64::INFINITY);
        t.bound = Some(2.0 * f64::from(n.v_max()) * tau.powf(1.0 - s.alpha_used.to_f64()));
        t.tau_b_check = Some(tau_b_check(s, n)?);
        t.invariants = Some(split_invariants(s, n)?);
        let w = ExponentWindow::exponent(theta.clone(), eta.clone())?;
        t.did = Some(did_check(n, s, &w)?);
    }
    Ok(t)
}

/// Error for callers that need a split but landed in another regime.
pub fn expect_split(outcome: SplitOutcome) -> Result<SplitResult> {
    match outcome {
        SplitOutcome::Split(s) => Ok(*s),
        other => Err(Error::Construction(format!("no split: {other:?}"))),
    }
}
