//! Certified real arithmetic.
//!
//! A [`HighPrecisionReal`] is a closed interval `[lo, hi] * 2^-bits` with
//! integer endpoints. Every operation rounds outward, so the true value of
//! the expression that produced an interval always lies inside it.
//! Comparisons either decide with certainty (the intervals are disjoint, or
//! both are the same exact point) or report that the working precision is
//! not enough. [`escalate`] reruns a computation at doubled precision until
//! every comparison in it is decided, up to [`MAX_BITS`].

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{argument, Error, Result};

/// Working precision used when nothing else is configured.
pub const DEFAULT_BITS: u32 = 128;
/// Escalation gives up beyond this many fractional bits.
pub const MAX_BITS: u32 = 4096;
/// Smallest accepted working precision.
pub const MIN_BITS: u32 = 16;

static START_BITS: AtomicU32 = AtomicU32::new(DEFAULT_BITS);

/// Sets the precision at which [`escalate`] starts.
pub fn set_default_precision(bits: u32) -> Result<()> {
    if !(MIN_BITS..=MAX_BITS).contains(&bits) {
        return Err(argument(format!(
            "precision must be between {MIN_BITS} and {MAX_BITS} bits, got {bits}"
        )));
    }
    START_BITS.store(bits, AtomicOrdering::Relaxed);
    Ok(())
}

pub fn default_precision() -> u32 {
    START_BITS.load(AtomicOrdering::Relaxed)
}

/// Runs `f` at the default precision, doubling the precision each time it
/// reports [`Error::Undecided`]. Fails with [`Error::PrecisionExhausted`] once
/// the cap is reached.
pub fn escalate<T>(f: impl FnMut(u32) -> Result<T>) -> Result<T> {
    escalate_from(default_precision(), f)
}

pub fn escalate_from<T>(start: u32, mut f: impl FnMut(u32) -> Result<T>) -> Result<T> {
    let mut bits = start.clamp(MIN_BITS, MAX_BITS);
    loop {
        match f(bits) {
            Err(Error::Undecided) if bits < MAX_BITS => bits = (bits * 2).min(MAX_BITS),
            Err(Error::Undecided) => return Err(Error::PrecisionExhausted { bits }),
            other => return other,
        }
    }
}

/// Turns an interval decision into a hard result; `None` becomes
/// [`Error::Undecided`].
pub fn certainly(decision: Option<bool>) -> Result<bool> {
    decision.ok_or(Error::Undecided)
}

#[derive(Clone, PartialEq, Eq)]
pub struct HighPrecisionReal {
    lo: BigInt,
    hi: BigInt,
    bits: u32,
}

impl fmt::Debug for HighPrecisionReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:.17e}, {:.17e}]@{}",
            self.lower_f64(),
            self.upper_f64(),
            self.bits
        )
    }
}

impl fmt::Display for HighPrecisionReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string(20))
    }
}

pub(crate) fn floor_shr(x: &BigInt, k: u32) -> BigInt {
    if k == 0 {
        return x.clone();
    }
    if x.sign() == Sign::Minus {
        -ceil_shr(&-x, k)
    } else {
        x >> k
    }
}

pub(crate) fn ceil_shr(x: &BigInt, k: u32) -> BigInt {
    if k == 0 {
        return x.clone();
    }
    if x.sign() == Sign::Minus {
        return -floor_shr(&-x, k);
    }
    let q = x >> k;
    let exact = x.is_zero() || x.trailing_zeros().is_some_and(|tz| tz >= u64::from(k));
    if exact {
        q
    } else {
        q + 1
    }
}

fn div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

fn bigint_to_f64_scaled(x: &BigInt, bits: u32) -> f64 {
    let len = x.bits();
    let (m, extra) = if len > 60 {
        let extra = len - 60;
        (floor_shr(x, extra as u32), extra as i64)
    } else {
        (x.clone(), 0)
    };
    let e = extra - i64::from(bits);
    let mf = m.to_f64().unwrap_or(0.0);
    if e > 2000 {
        return mf.signum() * f64::INFINITY;
    }
    if e < -2000 {
        return 0.0;
    }
    mf * 2f64.powi(e as i32)
}

impl HighPrecisionReal {
    fn from_parts(lo: BigInt, hi: BigInt, bits: u32) -> Self {
        debug_assert!(lo <= hi);
        HighPrecisionReal { lo, hi, bits }
    }

    pub fn from_integer(n: impl Into<BigInt>, bits: u32) -> Self {
        let v = n.into() << bits;
        Self::from_parts(v.clone(), v, bits)
    }

    pub fn from_biguint(n: &BigUint, bits: u32) -> Self {
        Self::from_integer(BigInt::from(n.clone()), bits)
    }

    pub fn from_ratio(r: &BigRational, bits: u32) -> Self {
        let num = r.numer() << bits;
        let lo = num.div_floor(r.denom());
        let hi = div_ceil(&num, r.denom());
        Self::from_parts(lo, hi, bits)
    }

    /// Interval spanning two already-certified bounds.
    pub fn from_bounds(lower: &BigRational, upper: &BigRational, bits: u32) -> Self {
        let lo = Self::from_ratio(lower, bits).lo;
        let hi = Self::from_ratio(upper, bits).hi;
        Self::from_parts(lo, hi, bits)
    }

    pub fn zero(bits: u32) -> Self {
        Self::from_integer(0, bits)
    }

    pub fn one(bits: u32) -> Self {
        Self::from_integer(1, bits)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn lower(&self) -> BigRational {
        BigRational::new(self.lo.clone(), BigInt::one() << self.bits)
    }

    pub fn upper(&self) -> BigRational {
        BigRational::new(self.hi.clone(), BigInt::one() << self.bits)
    }

    pub fn lower_f64(&self) -> f64 {
        bigint_to_f64_scaled(&self.lo, self.bits)
    }

    pub fn upper_f64(&self) -> f64 {
        bigint_to_f64_scaled(&self.hi, self.bits)
    }

    /// Midpoint as a float; for display and diagnostics only.
    pub fn to_f64(&self) -> f64 {
        let sum: BigInt = &self.lo + &self.hi;
        bigint_to_f64_scaled(&sum, self.bits + 1)
    }

    /// Width of the interval as a float.
    pub fn width_f64(&self) -> f64 {
        bigint_to_f64_scaled(&(&self.hi - &self.lo), self.bits)
    }

    /// Midpoint rendered with `digits` decimals (truncated toward -inf).
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let sum: BigInt = &self.lo + &self.hi;
        let scaled = sum * BigInt::from(10u32).pow(digits as u32);
        let v = floor_shr(&scaled, self.bits + 1);
        let neg = v.is_negative();
        let s = v.abs().to_string();
        let s = if s.len() <= digits {
            format!("{}{}", "0".repeat(digits + 1 - s.len()), s)
        } else {
            s
        };
        let (int, frac) = s.split_at(s.len() - digits);
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }

    pub fn contains(&self, r: &BigRational) -> bool {
        &self.lower() <= r && r <= &self.upper()
    }

    /// Re-expresses the interval at `bits` fractional bits, rounding outward.
    pub fn with_bits(&self, bits: u32) -> Self {
        match bits.cmp(&self.bits) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let k = bits - self.bits;
                Self::from_parts(&self.lo << k, &self.hi << k, bits)
            }
            Ordering::Less => {
                let k = self.bits - bits;
                Self::from_parts(floor_shr(&self.lo, k), ceil_shr(&self.hi, k), bits)
            }
        }
    }

    fn aligned(&self, other: &Self) -> (std::borrow::Cow<'_, Self>, Self) {
        let bits = self.bits.max(other.bits);
        let a = if self.bits == bits {
            std::borrow::Cow::Borrowed(self)
        } else {
            std::borrow::Cow::Owned(self.with_bits(bits))
        };
        (a, other.with_bits(bits))
    }

    /// `Some(true)` if every point of `self` is `<=` every point of `other`,
    /// `Some(false)` if every point is `>`, `None` otherwise.
    pub fn le(&self, other: &Self) -> Option<bool> {
        let (a, b) = self.aligned(other);
        if a.hi <= b.lo {
            Some(true)
        } else if a.lo > b.hi {
            Some(false)
        } else {
            None
        }
    }

    pub fn lt(&self, other: &Self) -> Option<bool> {
        let (a, b) = self.aligned(other);
        if a.hi < b.lo {
            Some(true)
        } else if a.lo >= b.hi {
            Some(false)
        } else {
            None
        }
    }

    pub fn ge(&self, other: &Self) -> Option<bool> {
        other.le(self)
    }

    pub fn gt(&self, other: &Self) -> Option<bool> {
        other.lt(self)
    }

    /// Sign of the value, if certain.
    pub fn signum(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// The integer part, if both endpoints agree on it.
    pub fn floor(&self) -> Option<BigInt> {
        let a = floor_shr(&self.lo, self.bits);
        let b = floor_shr(&self.hi, self.bits);
        (a == b).then_some(a)
    }

    pub fn ceil(&self) -> Option<BigInt> {
        let a = ceil_shr(&self.lo, self.bits);
        let b = ceil_shr(&self.hi, self.bits);
        (a == b).then_some(a)
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if k.is_negative() {
            Self::from_parts(b, a, self.bits)
        } else {
            Self::from_parts(a, b, self.bits)
        }
    }

    /// Division by a nonzero integer.
    pub fn div_int(&self, k: &BigInt) -> Result<Self> {
        if k.is_zero() {
            return Err(argument("division by zero"));
        }
        let (lo, hi) = if k.is_negative() {
            (-&self.hi, -&self.lo)
        } else {
            (self.lo.clone(), self.hi.clone())
        };
        let k = k.abs();
        Ok(Self::from_parts(lo.div_floor(&k), div_ceil(&hi, &k), self.bits))
    }

    /// Interval quotient; undecided if the divisor interval touches zero.
    pub fn div(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.aligned(other);
        let bits = b.bits;
        if b.lo.sign() != Sign::Plus && b.hi.sign() != Sign::Minus {
            return if b.is_point() {
                Err(argument("division by zero"))
            } else {
                Err(Error::Undecided)
            };
        }
        let candidates = [
            (&a.lo, &b.lo),
            (&a.lo, &b.hi),
            (&a.hi, &b.lo),
            (&a.hi, &b.hi),
        ];
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for (x, y) in candidates {
            let num = x << bits;
            let f = num.div_floor(y);
            let c = div_ceil(&num, y);
            if lo.as_ref().is_none_or(|l| &f < l) {
                lo = Some(f);
            }
            if hi.as_ref().is_none_or(|h| &c > h) {
                hi = Some(c);
            }
        }
        Ok(Self::from_parts(lo.unwrap(), hi.unwrap(), bits))
    }

    pub fn recip(&self) -> Result<Self> {
        Self::one(self.bits).div(self)
    }

    pub fn abs(&self) -> Self {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            -self
        } else {
            let m = (-&self.lo).max(self.hi.clone());
            Self::from_parts(BigInt::zero(), m, self.bits)
        }
    }

    pub fn max(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        Self::from_parts(a.lo.clone().max(b.lo.clone()), a.hi.clone().max(b.hi), b.bits)
    }

    pub fn min(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        Self::from_parts(a.lo.clone().min(b.lo.clone()), a.hi.clone().min(b.hi), b.bits)
    }

    /// Square root. Negative lower endpoints are clamped to zero as long as
    /// the interval still reaches nonnegative values.
    pub fn sqrt(&self) -> Result<Self> {
        if self.hi.is_negative() {
            return Err(argument("square root of a negative value"));
        }
        let lo = if self.lo.is_negative() {
            BigInt::zero()
        } else {
            self.lo.clone()
        };
        let lo_scaled = lo << self.bits;
        let hi_scaled = &self.hi << self.bits;
        let s_lo = lo_scaled.sqrt();
        let mut s_hi = hi_scaled.sqrt();
        if &s_hi * &s_hi != hi_scaled {
            s_hi += 1;
        }
        Ok(Self::from_parts(s_lo, s_hi, self.bits))
    }

    /// `self^k` for a nonnegative integer exponent.
    pub fn powi(&self, k: u32) -> Self {
        if k == 0 {
            return Self::one(self.bits);
        }
        if !self.lo.is_negative() {
            let mut base = self.clone();
            let mut acc = Self::one(self.bits);
            let mut e = k;
            while e > 0 {
                if e & 1 == 1 {
                    acc = &acc * &base;
                }
                e >>= 1;
                if e > 0 {
                    base = &base * &base;
                }
            }
            return acc;
        }
        let mut acc = Self::one(self.bits);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Natural logarithm.
    pub fn ln(&self) -> Result<Self> {
        if !self.hi.is_positive() {
            return Err(argument("logarithm of a nonpositive value"));
        }
        if !self.lo.is_positive() {
            return Err(Error::Undecided);
        }
        let (lo, hi_for_point) = ln_scaled(&self.lo, self.bits);
        let hi = if self.is_point() {
            hi_for_point
        } else {
            ln_scaled(&self.hi, self.bits).1
        };
        Ok(Self::from_parts(lo, hi, self.bits))
    }

    /// Exponential.
    pub fn exp(&self) -> Result<Self> {
        let (lo, hi_for_point) = exp_scaled(&self.lo, self.bits)?;
        let hi = if self.is_point() {
            hi_for_point
        } else {
            exp_scaled(&self.hi, self.bits)?.1
        };
        Ok(Self::from_parts(lo, hi, self.bits))
    }

    /// `self^exponent` for a positive base.
    pub fn powf(&self, exponent: &Self) -> Result<Self> {
        (&self.ln()? * exponent).exp()
    }
}

impl Add for &HighPrecisionReal {
    type Output = HighPrecisionReal;
    fn add(self, rhs: &HighPrecisionReal) -> HighPrecisionReal {
        let (a, b) = self.aligned(rhs);
        HighPrecisionReal::from_parts(&a.lo + b.lo, &a.hi + b.hi, b.bits)
    }
}

impl Sub for &HighPrecisionReal {
    type Output = HighPrecisionReal;
    fn sub(self, rhs: &HighPrecisionReal) -> HighPrecisionReal {
        let (a, b) = self.aligned(rhs);
        HighPrecisionReal::from_parts(&a.lo - b.hi, &a.hi - b.lo, b.bits)
    }
}

impl Neg for &HighPrecisionReal {
    type Output = HighPrecisionReal;
    fn neg(self) -> HighPrecisionReal {
        HighPrecisionReal::from_parts(-&self.hi, -&self.lo, self.bits)
    }
}

impl Mul for &HighPrecisionReal {
    type Output = HighPrecisionReal;
    fn mul(self, rhs: &HighPrecisionReal) -> HighPrecisionReal {
        let (a, b) = self.aligned(rhs);
        let bits = b.bits;
        let (min, max) = if !a.lo.is_negative() && !b.lo.is_negative() {
            (&a.lo * &b.lo, &a.hi * &b.hi)
        } else {
            let p = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
            let min = p.iter().min().unwrap().clone();
            let max = p.iter().max().unwrap().clone();
            (min, max)
        };
        HighPrecisionReal::from_parts(floor_shr(&min, bits), ceil_shr(&max, bits), bits)
    }
}

const LN_GUARD: u32 = 48;

/// Bounds on `atanh(p/q)` at `g` fractional bits, for `0 <= p/q <= 1/3`.
fn atanh_nonneg(p: &BigInt, q: &BigInt, g: u32) -> (BigInt, BigInt) {
    if p.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    let num = p << g;
    let mut pw_lo = num.div_floor(q);
    let mut pw_hi = div_ceil(&num, q);
    let p2 = p * p;
    let q2 = q * q;
    let num2 = p2 << g;
    let zz_lo = num2.div_floor(&q2);
    let zz_hi = div_ceil(&num2, &q2);
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let mut odd = BigInt::one();
    loop {
        sum_lo += pw_lo.div_floor(&odd);
        sum_hi += div_ceil(&pw_hi, &odd);
        pw_lo = floor_shr(&(&pw_lo * &zz_lo), g);
        pw_hi = ceil_shr(&(&pw_hi * &zz_hi), g);
        odd += 2;
        if pw_hi <= BigInt::one() {
            // Remaining tail is at most pw/(1 - z^2) <= 9/8 units.
            sum_hi += 2;
            break;
        }
    }
    (sum_lo, sum_hi)
}

fn atanh_signed(p: &BigInt, q: &BigInt, g: u32) -> (BigInt, BigInt) {
    if p.is_negative() {
        let (lo, hi) = atanh_nonneg(&-p, q, g);
        (-hi, -lo)
    } else {
        atanh_nonneg(p, q, g)
    }
}

fn ln2_bounds(g: u32) -> (BigInt, BigInt) {
    static CACHE: OnceLock<Mutex<HashMap<u32, (BigInt, BigInt)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&g) {
        return v.clone();
    }
    let (lo, hi) = atanh_nonneg(&BigInt::one(), &BigInt::from(3), g);
    let v = (lo * 2, hi * 2);
    cache.lock().unwrap().insert(g, v.clone());
    v
}

/// Bounds on `ln(m * 2^-bits)` at `bits` fractional bits, for `m > 0`.
fn ln_scaled(m: &BigInt, bits: u32) -> (BigInt, BigInt) {
    let g = bits + LN_GUARD;
    let nb = m.bits();
    // m = 2^(nb-1) * y with y in [1, 2); fold y > 3/2 into (3/4, 1).
    let mut k: i64 = nb as i64 - 1 - i64::from(bits);
    let mut d = BigInt::one() << (nb - 1);
    if m * 2 > &d * 3 {
        k += 1;
        d <<= 1;
    }
    let p = m - &d;
    let q = m + &d;
    let (at_lo, at_hi) = atanh_signed(&p, &q, g);
    let (l2_lo, l2_hi) = ln2_bounds(g);
    let kk = BigInt::from(k);
    let (klo, khi) = if k >= 0 {
        (&kk * &l2_lo, &kk * &l2_hi)
    } else {
        (&kk * &l2_hi, &kk * &l2_lo)
    };
    let lo = at_lo * 2 + klo;
    let hi = at_hi * 2 + khi;
    (floor_shr(&lo, LN_GUARD), ceil_shr(&hi, LN_GUARD))
}

/// Bounds on `exp(v * 2^-bits)` at `bits` fractional bits.
fn exp_scaled(v: &BigInt, bits: u32) -> Result<(BigInt, BigInt)> {
    if v.is_zero() {
        let one = BigInt::one() << bits;
        return Ok((one.clone(), one));
    }
    if v.is_negative() {
        let (a, b) = exp_scaled(&-v, bits)?;
        let num = BigInt::one() << (2 * bits);
        return Ok((num.div_floor(&b), div_ceil(&num, &a)));
    }
    let x_upper = bigint_to_f64_scaled(v, bits) * (1.0 + 1e-12) + 1e-12;
    let mag = (x_upper * std::f64::consts::LOG2_E).ceil() + 2.0;
    if !mag.is_finite() || mag > f64::from(1u32 << 22) {
        return Err(Error::Resource {
            what: "exponential magnitude (bits)",
            needed: format!("{mag}"),
            budget: format!("{}", 1u32 << 22),
        });
    }
    let mag = mag as u32;
    let vbits = v.bits() as i64;
    let j = (vbits - i64::from(bits) + 10).max(0) as u32;
    let g = bits + mag + j + 32;
    let r = v << (g - bits - j);
    let unit = BigInt::one() << g;
    let mut t_lo = unit.clone();
    let mut t_hi = unit.clone();
    let mut s_lo = unit.clone();
    let mut s_hi = unit;
    let mut k = BigInt::one();
    loop {
        t_lo = floor_shr(&(&t_lo * &r), g).div_floor(&k);
        t_hi = div_ceil(&ceil_shr(&(&t_hi * &r), g), &k);
        s_lo += &t_lo;
        s_hi += &t_hi;
        if t_hi <= BigInt::one() {
            s_hi += 2;
            break;
        }
        k += 1;
    }
    for _ in 0..j {
        s_lo = floor_shr(&(&s_lo * &s_lo), g);
        s_hi = ceil_shr(&(&s_hi * &s_hi), g);
    }
    Ok((floor_shr(&s_lo, g - bits), ceil_shr(&s_hi, g - bits)))
}

/// Natural logarithm of a positive integer, memoized for machine-sized inputs.
pub fn ln_integer(n: &BigUint, bits: u32) -> Result<HighPrecisionReal> {
    if n.is_zero() {
        return Err(argument("logarithm of zero"));
    }
    type Cache = Mutex<HashMap<(u64, u32), (BigInt, BigInt)>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let key = n.to_u64().map(|v| (v, bits));
    if let Some(key) = key {
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some((lo, hi)) = cache.lock().unwrap().get(&key) {
            return Ok(HighPrecisionReal::from_parts(lo.clone(), hi.clone(), bits));
        }
        let v = HighPrecisionReal::from_biguint(n, bits).ln()?;
        let mut guard = cache.lock().unwrap();
        if guard.len() > 1 << 21 {
            guard.clear();
        }
        guard.insert(key, (v.lo.clone(), v.hi.clone()));
        return Ok(v);
    }
    HighPrecisionReal::from_biguint(n, bits).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn ratio_round_trip_contains_value() {
        let x = HighPrecisionReal::from_ratio(&r(1, 3), 64);
        assert!(x.contains(&r(1, 3)));
        assert!(!x.is_point());
        let h = HighPrecisionReal::from_ratio(&r(3, 8), 64);
        assert!(h.is_point());
    }

    #[test]
    fn ln_and_exp_match_floats() {
        for &v in &[1.0f64, 2.0, 3.0, 10.0, 0.3, 1e-5, 12345.678, 1e30] {
            let x = HighPrecisionReal::from_ratio(
                &BigRational::from_float(v).unwrap(),
                128,
            );
            let l = x.ln().unwrap();
            assert!((l.to_f64() - v.ln()).abs() < 1e-12 * v.ln().abs().max(1.0));
            assert!(l.width_f64() < 1e-30);
        }
        for &v in &[0.0f64, 1.0, -1.0, 0.5, 20.0, -20.0, 100.0, 700.0] {
            let x = HighPrecisionReal::from_ratio(&BigRational::from_float(v).unwrap(), 128);
            let e = x.exp().unwrap();
            let want = v.exp();
            assert!((e.to_f64() - want).abs() <= 1e-12 * want, "{v}: {e:?}");
        }
    }

    #[test]
    fn ln2_is_bracketed() {
        let l = HighPrecisionReal::from_integer(2, 200).ln().unwrap();
        // ln 2 = 0.693147180559945309417232121458176568075500134360255254120680...
        let lo = r(693_147_180_559_945_309, 1_000_000_000_000_000_000);
        let hi = r(693_147_180_559_945_310, 1_000_000_000_000_000_000);
        assert!(l.lower() >= lo && l.upper() <= hi);
    }

    #[test]
    fn exact_points_compare_as_equal() {
        let a = HighPrecisionReal::from_integer(10, 128);
        let b = HighPrecisionReal::from_integer(100, 128).sqrt().unwrap();
        assert!(b.is_point());
        assert_eq!(a.le(&b), Some(true));
        assert_eq!(a.lt(&b), Some(false));
    }

    #[test]
    fn escalation_stops_at_cap() {
        let calls = std::cell::Cell::new(0);
        let out: Result<()> = escalate_from(128, |_| {
            calls.set(calls.get() + 1);
            Err(Error::Undecided)
        });
        assert_eq!(out, Err(Error::PrecisionExhausted { bits: MAX_BITS }));
        assert_eq!(calls.get(), 6);
    }

    #[test]
    fn decimal_rendering() {
        let x = HighPrecisionReal::from_ratio(&r(-5, 4), 64);
        assert_eq!(x.to_decimal_string(3), "-1.250");
        let y = HighPrecisionReal::from_ratio(&r(1, 8), 64);
        assert_eq!(y.to_decimal_string(2), "0.12");
    }
}
