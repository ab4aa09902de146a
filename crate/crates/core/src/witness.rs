//! Extremal constructions: integers `N` with `binom(s, r)` divisors packed
//! into `[N^θ, N^θ + N^(θ-ε)]`, and single-divisor witnesses for any
//! `0 < ε < θ`.
//!
//! The packing takes `s` primes just above `M` and multiplies their product
//! `N0` by the largest cofactor `m` that keeps every product of `r` of the
//! primes above `N^θ`. Every window decision is exact or certified.

use num_bigint::BigUint;
use num_integer::{binomial, Integer};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::power::RationalPower;
use crate::arith::{
    certainly, default_precision, escalate, ln_integer, primes_above, primes_at_most, ratio_to_f64,
    FactoredInteger, HighPrecisionReal,
};
use crate::error::{argument, Error, Result};
use crate::report::{decimal, decimal_seq, ratio, real};
use crate::window::{integer_window, ExponentWindow};

type Real = HighPrecisionReal;

/// `s` and `r` for the packing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SubsetChoice {
    pub s: u32,
    pub r: u32,
    /// `θs` was an integer, so `r = θs + 1`.
    pub fractional_edge: bool,
}

/// `s = floor(1/ε - 3/(2θ))`; `r = ceil(θs)` when `0 < {θs} <= 1/2`,
/// otherwise `ceil(θs) + 1`.
pub fn choose_s_r(theta: &BigRational, epsilon: &BigRational) -> Result<SubsetChoice> {
    let half = BigRational::new(1.into(), 2.into());
    if !theta.is_positive() || theta > &half {
        return Err(argument(
            "the packing needs 0 < theta <= 1/2; use the large-theta construction for theta > 1/2",
        ));
    }
    if !epsilon.is_positive() || epsilon > &(theta * &half) {
        return Err(argument(
            "the packing needs 0 < epsilon <= theta/2; use the single-divisor witness otherwise",
        ));
    }
    let three_halves = BigRational::new(3.into(), 2.into());
    let s_val = (epsilon.recip() - three_halves / theta).floor().to_integer();
    let s = s_val
        .to_u32()
        .filter(|&s| s >= 1)
        .ok_or_else(|| argument(format!("s = {s_val} is not a usable subset size")))?;
    let ts = theta * BigRational::from_integer(s.into());
    let frac = ts.fract();
    let ceil = ts.ceil().to_integer().to_u32().unwrap_or(u32::MAX);
    let (r, fractional_edge) = if frac.is_zero() {
        (ceil + 1, true)
    } else if frac <= half {
        (ceil, false)
    } else {
        (ceil + 1, false)
    };
    if r > s {
        return Err(argument(format!("r = {r} exceeds s = {s}")));
    }
    Ok(SubsetChoice { s, r, fractional_edge })
}

/// Which construction produced a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessVariant {
    /// Primes in `(M, M+L]`, divisors in `[N^θ, N^θ + N^(θ-ε)]`.
    Packing,
    /// Primes in `[M-L, M]` with `1-θ` in place of `θ`; divisors in
    /// `[N^(1-θ) - N^(1-θ-ε)/2, N^(1-θ)]`, complements near `N^θ`.
    Mirror,
}

/// Full transcript of a packing construction.
///
/// For [`WitnessVariant::Mirror`] the window fields describe the window in
/// which the `r`-fold products themselves land, `m` is the minimal cofactor
/// and `n0` holds the primes below `M`.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub variant: WitnessVariant,
    #[serde(serialize_with = "ratio")]
    pub theta: BigRational,
    #[serde(serialize_with = "ratio")]
    pub epsilon: BigRational,
    #[serde(rename = "M", serialize_with = "decimal")]
    pub big_m: BigUint,
    #[serde(rename = "L", serialize_with = "real")]
    pub l: Real,
    pub s: u32,
    pub r: u32,
    pub fractional_edge: bool,
    /// `r/θ < s + 3/(2θ)` with the exponent actually used.
    pub r_bound_holds: bool,
    #[serde(serialize_with = "decimal_seq")]
    pub primes: Vec<BigUint>,
    #[serde(rename = "N0")]
    pub n0: FactoredInteger,
    #[serde(serialize_with = "decimal")]
    pub m: BigUint,
    /// `m` is extremal: it satisfies the defining inequality and its
    /// neighbour (`m+1` for the packing, `m-1` for the mirror) does not.
    pub m_extremal: bool,
    #[serde(rename = "N", serialize_with = "decimal")]
    pub n: BigUint,
    #[serde(serialize_with = "real")]
    pub window_lo: Real,
    #[serde(serialize_with = "real")]
    pub window_hi: Real,
    #[serde(serialize_with = "decimal")]
    pub window_int_lo: BigUint,
    #[serde(serialize_with = "decimal")]
    pub window_int_hi: BigUint,
    pub packed_count: u64,
    pub binom_target: u64,
    /// `M^r <= q <= (M+L)^r` for every product (`(M-L)^r <= q <= M^r` for
    /// the mirror).
    pub product_size_holds: bool,
    /// Mirror only: products whose complement `N/q` lies in
    /// `[N^θ, N^θ + 1.2 N^(θ-ε)]`.
    pub complement_count: Option<u64>,
    pub success: bool,
}

/// Result of the large-θ entry point.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LargeThetaOutcome {
    Mirror(Box<WitnessReport>),
    /// `ε` is too large for packing; only a single divisor is claimed.
    SingleDivisor(Box<Prop4Witness>),
}

fn rat(n: u64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn decide(mut f: impl FnMut(u32) -> Result<Option<bool>>) -> Result<bool> {
    escalate(|bits| certainly(f(bits)?))
}

/// `n^e` for a rational exponent of either sign.
fn pow_real(n: &BigUint, e: &BigRational, bits: u32) -> Result<Real> {
    if e.is_negative() {
        RationalPower::new(n, &-e)?.interval(bits)?.recip()
    } else {
        RationalPower::new(n, e)?.interval(bits)
    }
}

fn log_squared(m: &BigUint, bits: u32) -> Result<Real> {
    Ok(ln_integer(m, bits)?.powi(2))
}

fn subsets(s: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, s: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..s {
            if s - i < r - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, s, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, s, r, &mut Vec::with_capacity(r), &mut out);
    out
}

fn subset_products(primes: &[BigUint], r: usize) -> Vec<BigUint> {
    subsets(primes.len(), r)
        .into_par_iter()
        .map(|ix| ix.iter().map(|&i| &primes[i]).product())
        .collect()
}

fn count_in(products: &[BigUint], lo: &BigUint, hi: &BigUint) -> u64 {
    products.par_iter().filter(|q| *q >= lo && *q <= hi).count() as u64
}

fn ceil_real(f: impl Fn(u32) -> Result<Real>) -> Result<BigUint> {
    let c = escalate(|bits| f(bits)?.ceil().ok_or(Error::Undecided))?;
    Ok(c.to_biguint().unwrap_or_default())
}

fn floor_real(f: impl Fn(u32) -> Result<Real>) -> Result<BigUint> {
    let c = escalate(|bits| f(bits)?.floor().ok_or(Error::Undecided))?;
    Ok(c.to_biguint().unwrap_or_default())
}

fn binom_u64(s: u32, r: u32) -> u64 {
    binomial(BigUint::from(s), BigUint::from(r))
        .to_u64()
        .unwrap_or(u64::MAX)
}

/// Packing construction for `θ <= 1/2`.
///
/// Errors when `(θ, ε)` is outside the branch or when `(M, M+L]` holds fewer
/// than `s` primes. A report whose products miss the window is returned
/// with `success = false`.
pub fn build_witness(theta: &BigRational, epsilon: &BigRational, big_m: &BigUint) -> Result<WitnessReport> {
    let choice = choose_s_r(theta, epsilon)?;
    let (s, r) = (choice.s, choice.r);
    if big_m < &BigUint::from(3u32) {
        return Err(argument("M must be at least 3"));
    }
    let primes = primes_above(big_m, s as usize);
    let span = primes[primes.len() - 1].clone() - big_m;
    let fits = decide(|bits| Ok(Real::from_biguint(&span, bits).le(&log_squared(big_m, bits)?)))?;
    if !fits {
        return Err(Error::Construction(format!(
            "fewer than {s} primes in (M, M+L] for M = {big_m}"
        )));
    }
    let n0 = FactoredInteger::from_prime_powers(primes.iter().map(|p| (p.clone(), 1)))?;

    let ms = big_m.pow(s);
    let mr = big_m.pow(r);
    let theta_s = theta * rat(s.into());
    // 1 + θsL(M+L)^(s-1)/M^s
    let slack = |bits: u32| -> Result<Real> {
        let l = log_squared(big_m, bits)?;
        let ml = &Real::from_biguint(big_m, bits) + &l;
        let k = &(&Real::from_ratio(&theta_s, bits) * &l) * &ml.powi(s - 1);
        Ok(&Real::one(bits) + &k.div(&Real::from_biguint(&ms, bits))?)
    };
    // M^r >= (v M^s)^θ (1 + K)
    let admissible = |v: &BigUint| -> Result<bool> {
        let base = v * &ms;
        let p = RationalPower::new(&base, theta)?;
        decide(|bits| {
            let rhs = &p.interval(bits)? * &slack(bits)?;
            Ok(rhs.le(&Real::from_biguint(&mr, bits)))
        })
    };

    let e = rat(r.into()) / theta - rat(s.into());
    let m_power = RationalPower::new(big_m, &e)?;
    let inv_theta = theta.recip();
    let m = floor_real(|bits| {
        let damp = slack(bits)?.powf(&Real::from_ratio(&inv_theta, bits))?;
        m_power.interval(bits)?.div(&damp)
    })?;
    if m.is_zero() {
        return Err(Error::Construction(format!(
            "no cofactor v >= 1 satisfies the defining inequality for M = {big_m}"
        )));
    }
    let m_extremal = admissible(&m)? && !admissible(&(&m + 1u32))?;
    let n = &m * n0.value();

    let products = subset_products(&primes, r as usize);
    let eta = theta - epsilon;
    let (lo_int, hi_int) = integer_window(&n, &ExponentWindow::exponent(theta.clone(), eta.clone())?)?;
    let packed_count = count_in(&products, &lo_int, &hi_int);

    let bits = default_precision();
    let window_lo = pow_real(&n, theta, bits)?;
    let window_hi = &window_lo + &pow_real(&n, &eta, bits)?;

    let top = products.iter().max().cloned().unwrap_or_default();
    let bottom_ok = products.iter().all(|q| q >= &mr);
    let top_ok = decide(|bits| {
        let ml = &Real::from_biguint(big_m, bits) + &log_squared(big_m, bits)?;
        Ok(Real::from_biguint(&top, bits).le(&ml.powi(r)))
    })?;

    let binom_target = binom_u64(s, r);
    Ok(WitnessReport {
        variant: WitnessVariant::Packing,
        theta: theta.clone(),
        epsilon: epsilon.clone(),
        big_m: big_m.clone(),
        l: log_squared(big_m, bits)?,
        s,
        r,
        fractional_edge: choice.fractional_edge,
        r_bound_holds: r_bound(theta, s, r),
        primes,
        n0,
        m,
        m_extremal,
        n,
        window_lo,
        window_hi,
        window_int_lo: lo_int,
        window_int_hi: hi_int,
        packed_count,
        binom_target,
        product_size_holds: bottom_ok && top_ok,
        complement_count: None,
        success: packed_count == binom_target,
    })
}

fn r_bound(theta: &BigRational, s: u32, r: u32) -> bool {
    rat(r.into()) / theta < rat(s.into()) + BigRational::new(3.into(), 2.into()) / theta
}

/// Large-θ construction. Packs with `1-θ` in place of `θ` using the primes
/// in `[M-L, M]`; defers to [`prop4_witness`] (with cofactor `M`) when `ε`
/// is too large for a packing.
pub fn build_witness_large_theta(
    theta: &BigRational,
    epsilon: &BigRational,
    big_m: &BigUint,
) -> Result<LargeThetaOutcome> {
    let one = BigRational::one();
    let half = BigRational::new(1.into(), 2.into());
    if theta < &half || theta >= &one {
        return Err(argument("the large-theta construction needs 1/2 <= theta < 1"));
    }
    if !epsilon.is_positive() || epsilon >= theta {
        return Err(argument("expected 0 < epsilon < theta"));
    }
    let dual = &one - theta;
    if epsilon * BigRational::from_integer(2.into()) > dual {
        return Ok(LargeThetaOutcome::SingleDivisor(Box::new(prop4_witness(theta, epsilon, big_m)?)));
    }
    let choice = choose_s_r(&dual, epsilon)?;
    let (s, r) = (choice.s, choice.r);
    if big_m < &BigUint::from(3u32) {
        return Err(argument("M must be at least 3"));
    }
    let primes = primes_at_most(big_m, s as usize);
    if primes.len() < s as usize {
        return Err(Error::Construction(format!("fewer than {s} primes below M = {big_m}")));
    }
    let span = big_m - &primes[0];
    let fits = decide(|bits| Ok(Real::from_biguint(&span, bits).le(&log_squared(big_m, bits)?)))?;
    if !fits {
        return Err(Error::Construction(format!(
            "fewer than {s} primes in [M-L, M] for M = {big_m}"
        )));
    }
    let n1 = FactoredInteger::from_prime_powers(primes.iter().map(|p| (p.clone(), 1)))?;

    let ms = big_m.pow(s);
    let mr = big_m.pow(r);
    let dual_s = &dual * rat(s.into());
    // 1 - (1-θ)sL / (M (1 - sL/M)^θ)
    let shrink = |bits: u32| -> Result<Real> {
        let l = log_squared(big_m, bits)?;
        let mm = Real::from_biguint(big_m, bits);
        let sl = &Real::from_ratio(&rat(s.into()), bits) * &l;
        let inner = &Real::one(bits) - &sl.div(&mm)?;
        if inner.signum() != Some(std::cmp::Ordering::Greater) {
            return Err(Error::Construction(format!("sL >= M for M = {big_m}")));
        }
        let den = &mm * &inner.powf(&Real::from_ratio(theta, bits))?;
        let c = &Real::one(bits) - &(&Real::from_ratio(&dual_s, bits) * &l).div(&den)?;
        if c.signum() != Some(std::cmp::Ordering::Greater) {
            return Err(Error::Construction(format!("nonpositive correction factor for M = {big_m}")));
        }
        Ok(c)
    };
    let admissible = |v: &BigUint| -> Result<bool> {
        let base = v * &ms;
        let p = RationalPower::new(&base, &dual)?;
        decide(|bits| {
            let rhs = &p.interval(bits)? * &shrink(bits)?;
            Ok(Real::from_biguint(&mr, bits).le(&rhs))
        })
    };
    let e = rat(r.into()) / &dual - rat(s.into());
    let m_power = RationalPower::new(big_m, &e)?;
    let inv_dual = dual.recip();
    let m = ceil_real(|bits| {
        let damp = shrink(bits)?.powf(&Real::from_ratio(&inv_dual, bits))?;
        m_power.interval(bits)?.div(&damp)
    })?
    .max(BigUint::one());
    let m_extremal = admissible(&m)? && (m.is_one() || !admissible(&(&m - 1u32))?);
    let n = &m * n1.value();

    let products = subset_products(&primes, r as usize);
    let eta = &dual - epsilon;
    let hi_int = RationalPower::new(&n, &dual)?.floor()?;
    let lo_int = ceil_real(|bits| {
        let half_y = pow_real(&n, &eta, bits)?.div_int(&2.into())?;
        Ok(&pow_real(&n, &dual, bits)? - &half_y)
    })?;
    let packed_count = count_in(&products, &lo_int, &hi_int);

    let bits = default_precision();
    let window_hi = pow_real(&n, &dual, bits)?;
    let window_lo = &window_hi - &pow_real(&n, &eta, bits)?.div_int(&2.into())?;

    let c_lo = RationalPower::new(&n, theta)?.ceil()?;
    let c_eta = theta - epsilon;
    let c_hi = floor_real(|bits| {
        let y = &pow_real(&n, &c_eta, bits)? * &Real::from_ratio(&BigRational::new(6.into(), 5.into()), bits);
        Ok(&pow_real(&n, theta, bits)? + &y)
    })?;
    let complement_count = products
        .par_iter()
        .filter(|q| {
            let c = &n / *q;
            c >= c_lo && c <= c_hi
        })
        .count() as u64;

    let bottom = products.iter().min().cloned().unwrap_or_default();
    let top_ok = products.iter().all(|q| q <= &mr);
    let bottom_ok = decide(|bits| {
        let ml = &Real::from_biguint(big_m, bits) - &log_squared(big_m, bits)?;
        Ok(ml.powi(r).le(&Real::from_biguint(&bottom, bits)))
    })?;

    let binom_target = binom_u64(s, r);
    Ok(LargeThetaOutcome::Mirror(Box::new(WitnessReport {
        variant: WitnessVariant::Mirror,
        theta: theta.clone(),
        epsilon: epsilon.clone(),
        big_m: big_m.clone(),
        l: log_squared(big_m, bits)?,
        s,
        r,
        fractional_edge: choice.fractional_edge,
        r_bound_holds: r_bound(&dual, s, r),
        primes,
        n0: n1,
        m,
        m_extremal,
        n,
        window_lo,
        window_hi,
        window_int_lo: lo_int,
        window_int_hi: hi_int,
        packed_count,
        binom_target,
        product_size_holds: bottom_ok && top_ok,
        complement_count: Some(complement_count),
        success: packed_count == binom_target,
    })))
}

/// An integer `n` with one divisor in `[n^θ, n^θ + n^(θ-ε)]`.
#[derive(Clone, Debug, Serialize)]
pub struct Prop4Witness {
    #[serde(serialize_with = "ratio")]
    pub theta: BigRational,
    #[serde(serialize_with = "ratio")]
    pub epsilon: BigRational,
    #[serde(serialize_with = "decimal")]
    pub m: BigUint,
    #[serde(serialize_with = "decimal")]
    pub v: BigUint,
    #[serde(serialize_with = "decimal")]
    pub n0: BigUint,
    /// The divisor of `n0` near `n0^θ`: `m` itself for `θ <= 1/2`, else
    /// `n0/m`.
    #[serde(serialize_with = "decimal")]
    pub divisor: BigUint,
    /// The divisor lies in `[n0^θ, n0^θ + n0^(θ-ε)]`.
    pub in_window: bool,
}

/// Single-divisor witness built from the cofactor `m`.
///
/// For `θ <= 1/2`, `v` is the least integer with `m < v^θ` and `n0` is the
/// largest multiple of `m` in `[v-m, v-1]`; the check is
/// `n0^θ <= m <= n0^θ + 1.1θ n0^(2θ-1)`. For `θ > 1/2` the roles flip:
/// `v` is the least integer with `v^(1-θ) >= m`, `n0` the least multiple of
/// `m` that is `>= v`, and the divisor is `n0/m`, checked against
/// `n0^(1-θ) - 1.1(1-θ) n0^(1-2θ) <= m` and
/// `n0^θ <= n0/m <= n0^θ + 1.2(1-θ)`.
pub fn prop4_witness(theta: &BigRational, epsilon: &BigRational, m: &BigUint) -> Result<Prop4Witness> {
    let one = BigRational::one();
    if !theta.is_positive() || theta >= &one {
        return Err(argument("expected 0 < theta < 1"));
    }
    if !epsilon.is_positive() || epsilon >= theta {
        return Err(argument("expected 0 < epsilon < theta"));
    }
    if m.is_zero() {
        return Err(argument("m must be positive"));
    }
    let fail = |what: &str| Error::Construction(format!("m = {m} too small: {what} fails"));
    let half = BigRational::new(1.into(), 2.into());
    let two = BigRational::from_integer(2.into());
    let eta = theta - epsilon;

    let (v, n0, divisor) = if theta <= &half {
        let v = RationalPower::new(m, &theta.recip())?.floor()? + 1u32;
        let n0 = m * ((&v - 1u32) / m);
        let lower = decide(|bits| Ok(pow_real(&n0, theta, bits)?.le(&Real::from_biguint(m, bits))))?;
        if !lower {
            return Err(fail("n0^theta <= m"));
        }
        let upper = decide(|bits| {
            let slack = &Real::from_ratio(&(theta * BigRational::new(11.into(), 10.into())), bits)
                * &pow_real(&n0, &(theta * &two - &one), bits)?;
            Ok(Real::from_biguint(m, bits).le(&(&pow_real(&n0, theta, bits)? + &slack)))
        })?;
        if !upper {
            return Err(fail("m <= n0^theta + 1.1 theta n0^(2 theta - 1)"));
        }
        (v, n0, m.clone())
    } else {
        let dual = &one - theta;
        let v = RationalPower::new(m, &dual.recip())?.ceil()?;
        let n0 = m * Integer::div_ceil(&v, m);
        let divisor = &n0 / m;
        let mirrored = decide(|bits| {
            let top = pow_real(&n0, &dual, bits)?;
            let slack = &Real::from_ratio(&(&dual * BigRational::new(11.into(), 10.into())), bits)
                * &pow_real(&n0, &(&one - theta * &two), bits)?;
            let mm = Real::from_biguint(m, bits);
            Ok(match ((&top - &slack).le(&mm), mm.le(&top)) {
                (Some(a), Some(b)) => Some(a && b),
                _ => None,
            })
        })?;
        if !mirrored {
            return Err(fail("n0^(1-theta) - 1.1(1-theta) n0^(1-2 theta) <= m <= n0^(1-theta)"));
        }
        let chain = decide(|bits| {
            let x = pow_real(&n0, theta, bits)?;
            let d = Real::from_biguint(&divisor, bits);
            let slack = Real::from_ratio(&(&dual * BigRational::new(6.into(), 5.into())), bits);
            Ok(match (x.le(&d), d.le(&(&x + &slack))) {
                (Some(a), Some(b)) => Some(a && b),
                _ => None,
            })
        })?;
        if !chain {
            return Err(fail("n0^theta <= n0/m <= n0^theta + 1.2(1-theta)"));
        }
        (v, n0, divisor)
    };
    let in_window = decide(|bits| {
        let x = pow_real(&n0, theta, bits)?;
        let d = Real::from_biguint(&divisor, bits);
        let y = pow_real(&n0, &eta, bits)?;
        Ok(match (x.le(&d), d.le(&(&x + &y))) {
            (Some(a), Some(b)) => Some(a && b),
            _ => None,
        })
    })?;
    Ok(Prop4Witness {
        theta: theta.clone(),
        epsilon: epsilon.clone(),
        m: m.clone(),
        v,
        n0,
        divisor,
        in_window,
    })
}

/// `binom(s, r)` next to the entropy-based size estimate.
#[derive(Clone, Debug, Serialize)]
pub struct StirlingDiagnostic {
    #[serde(serialize_with = "decimal")]
    pub exact: BigUint,
    pub closed_form: f64,
}

/// `binom(s, r)` and `sqrt(εθ³) (θ^-θ (1-θ)^-(1-θ))^(1/ε)`. Informational.
pub fn stirling_diagnostic(s: u32, r: u32, theta: &BigRational, epsilon: &BigRational) -> Result<StirlingDiagnostic> {
    if r > s {
        return Err(argument("r must not exceed s"));
    }
    let t = ratio_to_f64(theta);
    let e = ratio_to_f64(epsilon);
    let base = t.powf(-t) * (1.0 - t).powf(-(1.0 - t));
    Ok(StirlingDiagnostic {
        exact: binomial(BigUint::from(s), BigUint::from(r)),
        closed_form: (e * t.powi(3)).sqrt() * base.powf(1.0 / e),
    })
}

/// Doubles `M` from `start` until the packing succeeds, at most `rounds`
/// times. Rounds that error (too few primes near `M`) are skipped.
pub fn search_witness(
    theta: &BigRational,
    epsilon: &BigRational,
    start: &BigUint,
    rounds: u32,
) -> Result<Option<WitnessReport>> {
    choose_s_r(theta, epsilon)?;
    let mut m = start.clone();
    for _ in 0..rounds {
        match build_witness(theta, epsilon, &m) {
            Ok(rep) if rep.success => return Ok(Some(rep)),
            Ok(_) | Err(Error::Construction(_)) => {}
            Err(e) => return Err(e),
        }
        m <<= 1;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_ratio;

    fn q(s: &str) -> BigRational {
        parse_ratio(s).unwrap()
    }

    #[test]
    fn subset_sizes() {
        let c = choose_s_r(&q("0.4"), &q("0.1")).unwrap();
        assert_eq!((c.s, c.r, c.fractional_edge), (6, 3, false));
        let c = choose_s_r(&q("0.5"), &q("0.1")).unwrap();
        assert_eq!((c.s, c.r), (7, 4));
        let c = choose_s_r(&q("0.25"), &q("0.05")).unwrap();
        assert_eq!((c.s, c.r), (14, 4));
        // θs = 2 exactly
        let c = choose_s_r(&q("0.5"), &q("0.125")).unwrap();
        assert_eq!((c.s, c.r, c.fractional_edge), (5, 3, false));
        let c = choose_s_r(&q("0.25"), &q("1/16")).unwrap();
        assert_eq!((c.s, c.r, c.fractional_edge), (10, 3, false));
        let c = choose_s_r(&q("0.25"), &q("1/18")).unwrap();
        assert_eq!((c.s, c.r, c.fractional_edge), (12, 4, true));
    }

    #[test]
    fn subset_size_branches() {
        assert!(matches!(choose_s_r(&q("0.6"), &q("0.1")), Err(Error::Argument(_))));
        assert!(matches!(choose_s_r(&q("0.4"), &q("0.3")), Err(Error::Argument(_))));
        assert!(matches!(choose_s_r(&q("0.4"), &q("0")), Err(Error::Argument(_))));
    }

    #[test]
    fn r_bound_on_grid() {
        for t in 1..=50u64 {
            for e in 1..=50u64 {
                let theta = BigRational::new(t.into(), 100.into());
                let eps = BigRational::new(e.into(), 200.into());
                if let Ok(c) = choose_s_r(&theta, &eps) {
                    assert!(r_bound(&theta, c.s, c.r), "theta={theta} eps={eps}");
                    assert!(c.r <= c.s);
                }
            }
        }
    }

    #[test]
    fn subsets_enumerate_binomially() {
        assert_eq!(subsets(6, 3).len(), 20);
        assert_eq!(subsets(7, 4).len(), 35);
        assert_eq!(subsets(4, 0).len(), 1);
        let all = subsets(5, 2);
        assert!(all.iter().all(|v| v.windows(2).all(|w| w[0] < w[1])));
    }

    #[test]
    fn tiny_m_is_reported_honestly() {
        match build_witness(&q("0.4"), &q("0.1"), &BigUint::from(10u32)) {
            Ok(rep) => assert!(rep.packed_count < 20 || rep.success),
            Err(Error::Construction(_)) => {}
            Err(e) => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn moderate_m_transcript_is_consistent() {
        let m = BigUint::from(10_000u32);
        let rep = build_witness(&q("0.4"), &q("0.1"), &m).unwrap();
        assert_eq!(rep.binom_target, 20);
        assert_eq!(rep.n, &rep.m * rep.n0.value());
        assert!(rep.primes.iter().all(|p| p > &m));
        assert!(rep.n0.factors().iter().all(|f| f.exponent == 1));
        assert!(rep.m_extremal);
        assert!(rep.product_size_holds);
        assert!(rep.r_bound_holds);
        // brute-force recount with exact integer powers: θ = 2/5, θ-ε = 3/10
        let lo = &rep.window_int_lo;
        let hi = &rep.window_int_hi;
        assert!(lo.pow(5) >= rep.n.pow(2) && (lo - 1u32).pow(5) < rep.n.pow(2));
        let products = subset_products(&rep.primes, 3);
        let direct = products.iter().filter(|q| q.pow(5) >= rep.n.pow(2) && *q <= hi).count() as u64;
        assert_eq!(direct, rep.packed_count);
    }

    #[test]
    fn packing_succeeds_at_frozen_m() {
        let m = BigUint::from(85_899_345_920_000u64);
        let rep = build_witness(&q("0.4"), &q("0.1"), &m).unwrap();
        assert!(rep.success);
        assert_eq!(rep.packed_count, 20);
        // sufficient integer test: q^5 >= N^2 and q <= floor(N^(2/5)) + floor(N^(3/10))
        let a = crate::arith::power::iroot(&rep.n.pow(2), 5);
        let b = crate::arith::power::iroot(&rep.n.pow(3), 10);
        for q in subset_products(&rep.primes, 3) {
            assert!(q.pow(5) >= rep.n.pow(2));
            assert!(q <= &a + &b);
        }
    }

    #[test]
    fn mirror_succeeds_at_frozen_m() {
        let m = BigUint::from(2_748_779_069_440_000u64);
        let out = build_witness_large_theta(&q("0.6"), &q("0.1"), &m).unwrap();
        let LargeThetaOutcome::Mirror(rep) = out else { panic!("expected mirror") };
        assert!(rep.success);
        assert_eq!(rep.complement_count, Some(20));
        // q <= N^(2/5) exactly
        for q in subset_products(&rep.primes, 3) {
            assert!(q.pow(5) <= rep.n.pow(2));
        }
    }

    #[test]
    fn mirror_and_deferral() {
        let out = build_witness_large_theta(&q("0.6"), &q("0.1"), &BigUint::from(10_000u32)).unwrap();
        let LargeThetaOutcome::Mirror(rep) = out else { panic!("expected mirror") };
        assert_eq!((rep.s, rep.r), (6, 3));
        assert!(rep.m_extremal);
        assert!(rep.primes.iter().all(|p| p <= &BigUint::from(10_000u32)));
        let out = build_witness_large_theta(&q("0.6"), &q("0.5"), &BigUint::from(1000u32)).unwrap();
        assert!(matches!(out, LargeThetaOutcome::SingleDivisor(_)));
    }

    #[test]
    fn single_divisor_examples() {
        let w = prop4_witness(&q("0.4"), &q("0.1"), &BigUint::from(100u32)).unwrap();
        assert_eq!(w.v, BigUint::from(100_001u32));
        assert_eq!(w.n0, BigUint::from(100_000u32));
        assert!(w.in_window);
        let w = prop4_witness(&q("0.5"), &q("0.1"), &BigUint::from(10u32)).unwrap();
        assert_eq!((w.v, w.n0), (BigUint::from(101u32), BigUint::from(100u32)));
        let w = prop4_witness(&q("0.3"), &q("0.1"), &BigUint::from(50u32)).unwrap();
        assert!(w.in_window);
        assert!(w.n0.is_multiple_of(&BigUint::from(50u32)));
    }

    #[test]
    fn single_divisor_large_theta() {
        let w = prop4_witness(&q("0.7"), &q("0.2"), &BigUint::from(40u32)).unwrap();
        assert!(w.in_window);
        assert_eq!(&w.divisor * 40u32, w.n0);
    }

    #[test]
    fn stirling_values() {
        let d = stirling_diagnostic(6, 3, &q("0.4"), &q("0.1")).unwrap();
        assert_eq!(d.exact, BigUint::from(20u32));
        let direct = (0.1f64 * 0.064).sqrt() * (0.4f64.powf(-0.4) * 0.6f64.powf(-0.6)).powi(10);
        assert!((d.closed_form - direct).abs() < 1e-9 * direct);
        assert_eq!(stirling_diagnostic(7, 4, &q("0.5"), &q("0.1")).unwrap().exact, BigUint::from(35u32));
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]
        #[test]
        fn single_divisor_lower_side(m in 2u64..5000, t in 1u64..=50) {
            let theta = BigRational::new(t.into(), 100.into());
            let eps = &theta / BigRational::from_integer(2.into());
            if let Ok(w) = prop4_witness(&theta, &eps, &BigUint::from(m)) {
                let ok = decide(|bits| Ok(pow_real(&w.n0, &theta, bits)?.le(&Real::from_biguint(&w.m, bits)))).unwrap();
                proptest::prop_assert!(ok);
                proptest::prop_assert!(w.n0 < w.v);
            }
        }
    }
}
