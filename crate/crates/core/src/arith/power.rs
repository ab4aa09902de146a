//! Exact and certified powers of integers with rational exponents.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::real::{escalate, HighPrecisionReal};
use crate::error::{argument, Error, Result};

/// Above this many bits for `n^p` the integer-root route gives way to
/// `exp(e ln n)`.
const ROOT_ROUTE_LIMIT_BITS: u64 = 1 << 16;

/// Floor of the `q`-th root of `x`.
pub fn iroot_u128(x: u128, q: u32) -> u128 {
    assert!(q >= 1);
    if q == 1 || x < 2 {
        return x;
    }
    let exceeds = |r: u128| r.checked_pow(q).is_none_or(|v| v > x);
    let mut r = (x as f64).powf(1.0 / f64::from(q)).round() as u128;
    while r > 0 && exceeds(r) {
        r -= 1;
    }
    while !exceeds(r + 1) {
        r += 1;
    }
    r
}

/// Floor of the `q`-th root of `x`.
pub fn iroot(x: &BigUint, q: u32) -> BigUint {
    assert!(q >= 1);
    if let Some(v) = x.to_u128() {
        return BigUint::from(iroot_u128(v, q));
    }
    x.nth_root(q)
}

/// Exact square root of a nonnegative rational, if it is rational.
pub fn sqrt_ratio_exact(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

/// The real number `base^exponent` for an integer `base >= 1` and a rational
/// `exponent >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPower {
    base: BigUint,
    num: u64,
    den: Option<u32>,
    exponent: BigRational,
    exact: Option<BigUint>,
}

impl RationalPower {
    pub fn new(base: &BigUint, exponent: &BigRational) -> Result<Self> {
        if base.is_zero() {
            return Err(argument("power base must be positive"));
        }
        if exponent.is_negative() {
            return Err(argument("power exponent must be nonnegative"));
        }
        let num = exponent
            .numer()
            .to_u64()
            .ok_or_else(|| argument("power exponent numerator too large"))?;
        let den = exponent.denom().to_u32();
        let mut p = RationalPower {
            base: base.clone(),
            num,
            den,
            exponent: exponent.clone(),
            exact: None,
        };
        p.exact = p.compute_exact();
        Ok(p)
    }

    pub fn base(&self) -> &BigUint {
        &self.base
    }

    pub fn exponent(&self) -> &BigRational {
        &self.exponent
    }

    fn powered_bits(&self) -> u64 {
        self.base.bits().saturating_mul(self.num)
    }

    fn compute_exact(&self) -> Option<BigUint> {
        if self.num == 0 || self.base.is_one() {
            return Some(BigUint::one());
        }
        let q = self.den?;
        // p/q is in lowest terms, so base^(p/q) is an integer iff base is a
        // perfect q-th power.
        let r = if u64::from(q) > self.base.bits() {
            // Only 1 is a q-th power below 2^q.
            return None;
        } else {
            iroot(&self.base, q)
        };
        if r.pow(q) != self.base {
            return None;
        }
        let p = u32::try_from(self.num).ok()?;
        (r.bits().saturating_mul(u64::from(p)) <= ROOT_ROUTE_LIMIT_BITS).then(|| r.pow(p))
    }

    /// The exact integer value, when `base^exponent` is an integer.
    pub fn exact(&self) -> Option<&BigUint> {
        self.exact.as_ref()
    }

    fn root_route(&self) -> Option<(u32, u32)> {
        let q = self.den?;
        let p = u32::try_from(self.num).ok()?;
        (self.powered_bits() <= ROOT_ROUTE_LIMIT_BITS).then_some((p, q))
    }

    /// Certified enclosure at `bits` fractional bits.
    pub fn interval(&self, bits: u32) -> Result<HighPrecisionReal> {
        if let Some(v) = &self.exact {
            return Ok(HighPrecisionReal::from_biguint(v, bits));
        }
        if let Some((p, q)) = self.root_route() {
            let scaled: BigUint = self.base.pow(p) << (u64::from(q) * u64::from(bits));
            let lo = BigInt::from(iroot(&scaled, q));
            let hi = &lo + 1;
            return Ok(HighPrecisionReal::from_bounds(
                &BigRational::new(lo, BigInt::one() << bits),
                &BigRational::new(hi, BigInt::one() << bits),
                bits,
            ));
        }
        let ln = super::real::ln_integer(&self.base, bits)?;
        let e = HighPrecisionReal::from_ratio(&self.exponent, bits);
        (&ln * &e).exp()
    }

    /// `floor(base^exponent)`, exact.
    pub fn floor(&self) -> Result<BigUint> {
        if let Some(v) = &self.exact {
            return Ok(v.clone());
        }
        if let Some((p, q)) = self.root_route() {
            return Ok(iroot(&self.base.pow(p), q));
        }
        let f = escalate(|bits| self.interval(bits)?.floor().ok_or(Error::Undecided))?;
        f.to_biguint()
            .ok_or_else(|| argument("negative floor of a positive power"))
    }

    /// `ceil(base^exponent)`, exact.
    pub fn ceil(&self) -> Result<BigUint> {
        match &self.exact {
            Some(v) => Ok(v.clone()),
            None => Ok(self.floor()? + 1u32),
        }
    }
}

/// `floor(n^(p/q))` and whether the power is an exact integer, when `n^p`
/// fits in 128 bits.
pub fn floor_power_u64(n: u64, p: u32, q: u32) -> Option<(u128, bool)> {
    let np = u128::from(n).checked_pow(p)?;
    let r = iroot_u128(np, q);
    Some((r, r.checked_pow(q) == Some(np)))
}

/// `floor(n^(p/q))` for `p <= q` and whether the power is exact. Beyond the
/// `u128` range the float estimate is corrected by exact big-integer powers.
pub fn floor_power_small(n: u64, p: u32, q: u32) -> (u64, bool) {
    debug_assert!(p <= q && q >= 1);
    if let Some((r, exact)) = floor_power_u64(n, p, q) {
        return (r as u64, exact);
    }
    let target = BigUint::from(n).pow(p);
    let above = |r: u64| BigUint::from(r).pow(q) > target;
    let mut r = (n as f64).powf(f64::from(p) / f64::from(q)) as u64;
    while r > 0 && above(r) {
        r -= 1;
    }
    while !above(r + 1) {
        r += 1;
    }
    (r, BigUint::from(r).pow(q) == target)
}

/// Splits a nonnegative rational into `(p, q)` machine integers.
pub fn small_ratio(r: &BigRational) -> Option<(u32, u32)> {
    if r.is_negative() {
        return None;
    }
    Some((r.numer().to_u32()?, r.denom().to_u32()?))
}

/// Smallest `d` with `d * e >= x` for a positive integer `e`.
pub fn ceil_div(x: &BigUint, e: &BigUint) -> BigUint {
    let (q, r) = x.div_rem(e);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_roots() {
        assert_eq!(iroot_u128(0, 3), 0);
        assert_eq!(iroot_u128(26, 3), 2);
        assert_eq!(iroot_u128(27, 3), 3);
        assert_eq!(iroot_u128(u128::MAX, 2), u128::from(u64::MAX));
        assert_eq!(iroot_u128(1 << 100, 100), 2);
        assert_eq!(iroot_u128((1 << 100) - 1, 100), 1);
    }

    #[test]
    fn exact_powers_are_detected() {
        let p = RationalPower::new(&BigUint::from(100u32), &rat(1, 2)).unwrap();
        assert_eq!(p.exact(), Some(&BigUint::from(10u32)));
        let p = RationalPower::new(&BigUint::from(100_000u32), &rat(2, 5)).unwrap();
        assert_eq!(p.exact(), Some(&BigUint::from(100u32)));
        let p = RationalPower::new(&BigUint::from(12u32), &rat(1, 2)).unwrap();
        assert_eq!(p.exact(), None);
        assert_eq!(p.floor().unwrap(), BigUint::from(3u32));
        assert_eq!(p.ceil().unwrap(), BigUint::from(4u32));
    }

    #[test]
    fn huge_denominators_use_the_log_route() {
        let e = rat(12_345, 1_000_003);
        let p = RationalPower::new(&BigUint::from(10u32).pow(40), &e).unwrap();
        let want = (40.0f64 * 10f64.ln() * 12_345.0 / 1_000_003.0).exp();
        let iv = p.interval(128).unwrap();
        assert!((iv.to_f64() - want).abs() < 1e-9 * want);
        assert_eq!(p.floor().unwrap(), BigUint::from(want.floor() as u64));
    }

    #[test]
    fn interval_encloses_root() {
        let p = RationalPower::new(&BigUint::from(12u32), &rat(3, 10)).unwrap();
        let iv = p.interval(96).unwrap();
        assert!((iv.to_f64() - 12f64.powf(0.3)).abs() < 1e-15);
    }

    #[test]
    fn small_powers_past_u128() {
        // 10^42 overflows u128; 10^(42/60) = 10^0.7.
        let (r, exact) = floor_power_small(1_000_000, 7, 10);
        assert_eq!((r, exact), (15_848, false));
        assert_eq!(floor_power_small(1 << 40, 9, 20), (1 << 18, true));
        for n in [2u64, 999_983, 1_000_000] {
            let (r, _) = floor_power_small(n, 39, 100);
            let p = RationalPower::new(&BigUint::from(n), &rat(39, 100)).unwrap();
            assert_eq!(BigUint::from(r), p.floor().unwrap());
        }
    }

    #[test]
    fn exact_rational_square_roots() {
        assert_eq!(sqrt_ratio_exact(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(sqrt_ratio_exact(&rat(2, 1)), None);
    }
}
