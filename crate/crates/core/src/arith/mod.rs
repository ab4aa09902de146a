//! Exact integer arithmetic: factorization, ordered divisor enumeration, the
//! arithmetic functions τ, ω, Ω₂ and V, and certified real comparisons.

mod factor;
pub mod power;
pub mod primes;
pub mod real;

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

pub use power::RationalPower;
pub use primes::{is_probable_prime, primes_above, primes_at_most, primes_up_to, SmallestFactorSieve};
pub use real::{
    certainly, default_precision, escalate, escalate_from, ln_integer, set_default_precision,
    HighPrecisionReal, DEFAULT_BITS, MAX_BITS,
};

use crate::error::{argument, Error, Result};

/// Default cap on the number of divisors enumerated for one integer.
pub const DEFAULT_DIVISOR_BUDGET: u64 = 1 << 20;
/// Default cap on the bit size accepted by [`factorize`].
pub const DEFAULT_FACTOR_BITS: u64 = 128;

/// A prime power `prime^exponent` with `exponent >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimePower {
    pub prime: BigUint,
    pub exponent: u32,
}

impl PrimePower {
    pub fn value(&self) -> BigUint {
        self.prime.pow(self.exponent)
    }
}

/// A positive integer together with its prime factorization.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FactoredInteger {
    value: BigUint,
    factors: Vec<PrimePower>,
}

impl fmt::Debug for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.value, self)
    }
}

impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|pp| {
                if pp.exponent == 1 {
                    pp.prime.to_string()
                } else {
                    format!("{}^{}", pp.prime, pp.exponent)
                }
            })
            .collect();
        write!(f, "{}", parts.join("·"))
    }
}

impl Serialize for FactoredInteger {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let factors: Vec<(String, u32)> = self
            .factors
            .iter()
            .map(|pp| (pp.prime.to_string(), pp.exponent))
            .collect();
        let mut st = s.serialize_struct("FactoredInteger", 2)?;
        st.serialize_field("value", &self.value.to_string())?;
        st.serialize_field("factors", &factors)?;
        st.end()
    }
}

/// τ(n), ω(n), Ω₂(n) = Σβ², and V(n) = max β.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArithProfile {
    #[serde(serialize_with = "crate::report::decimal")]
    pub tau: BigUint,
    pub omega: usize,
    pub big_omega2: u64,
    pub v_max: u32,
}

impl FactoredInteger {
    pub fn one() -> Self {
        FactoredInteger {
            value: BigUint::one(),
            factors: Vec::new(),
        }
    }

    /// Builds from `(prime, exponent)` pairs in any order. Repeated primes are
    /// merged and zero exponents dropped; every base must pass the primality
    /// test.
    pub fn from_prime_powers(pairs: impl IntoIterator<Item = (BigUint, u32)>) -> Result<Self> {
        let mut pairs: Vec<(BigUint, u32)> = pairs.into_iter().filter(|(_, e)| *e > 0).collect();
        pairs.sort();
        let mut factors: Vec<PrimePower> = Vec::with_capacity(pairs.len());
        for (p, e) in pairs {
            if !is_probable_prime(&p) {
                return Err(argument(format!("{p} is not prime")));
            }
            match factors.last_mut() {
                Some(last) if last.prime == p => last.exponent += e,
                _ => factors.push(PrimePower { prime: p, exponent: e }),
            }
        }
        Ok(Self::from_sorted(factors))
    }

    fn from_sorted(factors: Vec<PrimePower>) -> Self {
        let value = factors
            .iter()
            .fold(BigUint::one(), |acc, pp| acc * pp.value());
        FactoredInteger { value, factors }
    }

    /// Factorization of `n <= sieve.limit()` read off a smallest-factor table.
    pub fn from_sieve(n: u32, sieve: &SmallestFactorSieve) -> Self {
        let factors = sieve
            .factor_pairs(n)
            .into_iter()
            .map(|(p, e)| PrimePower {
                prime: BigUint::from(p),
                exponent: e,
            })
            .collect();
        FactoredInteger {
            value: BigUint::from(n),
            factors,
        }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.value.to_u64()
    }

    pub fn factors(&self) -> &[PrimePower] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn profile(&self) -> ArithProfile {
        ArithProfile {
            tau: self.tau(),
            omega: self.factors.len(),
            big_omega2: self
                .factors
                .iter()
                .map(|pp| u64::from(pp.exponent).pow(2))
                .sum(),
            v_max: self.v_max(),
        }
    }

    pub fn tau(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, pp| acc * (pp.exponent + 1))
    }

    pub fn v_max(&self) -> u32 {
        self.factors.iter().map(|pp| pp.exponent).max().unwrap_or(0)
    }

    /// Product of the prime powers at `indices` (into [`Self::factors`]).
    pub fn sub_product(&self, indices: &[usize]) -> Self {
        let mut factors: Vec<PrimePower> = indices.iter().map(|&i| self.factors[i].clone()).collect();
        factors.sort();
        factors.dedup();
        Self::from_sorted(factors)
    }

    /// Product with an integer sharing no prime with `self`.
    pub fn mul_coprime(&self, other: &Self) -> Result<Self> {
        let mut factors = self.factors.clone();
        for pp in &other.factors {
            if self.factors.iter().any(|q| q.prime == pp.prime) {
                return Err(argument("factors are not coprime"));
            }
            factors.push(pp.clone());
        }
        factors.sort();
        Ok(Self::from_sorted(factors))
    }

    pub fn divides(&self, d: &BigUint) -> bool {
        !d.is_zero() && (&self.value % d).is_zero()
    }

    fn check_budget(&self, budget: u64) -> Result<()> {
        let tau = self.tau();
        if tau > BigUint::from(budget) {
            return Err(Error::Resource {
                what: "divisor enumeration τ(n)",
                needed: tau.to_string(),
                budget: budget.to_string(),
            });
        }
        Ok(())
    }

    /// All divisors in increasing order.
    pub fn divisors(&self) -> Result<Vec<BigUint>> {
        self.divisors_with_budget(DEFAULT_DIVISOR_BUDGET)
    }

    pub fn divisors_with_budget(&self, budget: u64) -> Result<Vec<BigUint>> {
        self.check_budget(budget)?;
        let ladders: Vec<(BigUint, u32)> = self
            .factors
            .iter()
            .map(|pp| (pp.prime.clone(), pp.exponent))
            .collect();
        Ok(sorted_divisors(&ladders, BigUint::one()))
    }

    /// Divisors as machine integers, when `n` fits in 64 bits.
    pub fn divisors_u64(&self) -> Result<Option<Vec<u64>>> {
        self.divisors_u64_with_budget(DEFAULT_DIVISOR_BUDGET)
    }

    pub fn divisors_u64_with_budget(&self, budget: u64) -> Result<Option<Vec<u64>>> {
        if self.value.to_u64().is_none() {
            return Ok(None);
        }
        self.check_budget(budget)?;
        let ladders: Vec<(u64, u32)> = self
            .factors
            .iter()
            .map(|pp| (pp.prime.to_u64().unwrap(), pp.exponent))
            .collect();
        Ok(Some(sorted_divisors(&ladders, 1u64)))
    }
}

fn merge_sorted<T: Ord + Clone>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i].clone());
            i += 1;
        } else {
            out.push(b[j].clone());
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Sorted divisors by merging, for each prime, the ladder `D, pD, p²D, ...`
/// of the divisors built so far.
fn sorted_divisors<T>(ladders: &[(T, u32)], one: T) -> Vec<T>
where
    T: Ord + Clone + for<'a> Mul<&'a T, Output = T>,
{
    let mut divs = vec![one];
    for (p, e) in ladders {
        let mut merged = divs.clone();
        let mut layer = divs;
        for _ in 0..*e {
            layer = layer.into_iter().map(|d| d * p).collect();
            merged = merge_sorted(&merged, &layer);
        }
        divs = merged;
    }
    divs
}

/// Full factorization of `n >= 1` under the default bit budget.
pub fn factorize(n: &BigUint) -> Result<FactoredInteger> {
    factorize_with_budget(n, DEFAULT_FACTOR_BITS)
}

pub fn factorize_with_budget(n: &BigUint, max_bits: u64) -> Result<FactoredInteger> {
    if n.is_zero() {
        return Err(argument("cannot factor 0"));
    }
    if n.bits() > max_bits {
        return Err(Error::Resource {
            what: "factorization input size (bits)",
            needed: n.bits().to_string(),
            budget: max_bits.to_string(),
        });
    }
    let factors = factor::prime_factor_pairs(n)
        .into_iter()
        .map(|(prime, exponent)| PrimePower { prime, exponent })
        .collect();
    Ok(FactoredInteger {
        value: n.clone(),
        factors,
    })
}

pub fn factorize_u64(n: u64) -> Result<FactoredInteger> {
    factorize(&BigUint::from(n))
}

/// Profile of a factored integer; see [`FactoredInteger::profile`].
pub fn profile(n: &FactoredInteger) -> ArithProfile {
    n.profile()
}

/// Sorted divisors; see [`FactoredInteger::divisors`].
pub fn divisors(n: &FactoredInteger) -> Result<Vec<BigUint>> {
    n.divisors()
}

/// Parses `"0.4"`, `"-1.25e-3"`, `"2/5"` or `"7"` into an exact rational.
pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || argument(format!("cannot parse {s:?} as an exact rational"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let mut num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10u32);
    let r = if scale >= 0 {
        BigRational::from_integer(num * ten.pow(scale as u32))
    } else {
        BigRational::new(num, ten.pow((-scale) as u32))
    };
    Ok(r)
}

/// Parses a nonnegative decimal integer.
pub fn parse_biguint(s: &str) -> Result<BigUint> {
    BigUint::from_str(s.trim()).map_err(|_| argument(format!("cannot parse {s:?} as an integer")))
}

/// Lossy float view of an exact rational, for display.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    HighPrecisionReal::from_ratio(r, 96).to_f64()
}

/// `gcd` of two big integers.
pub fn gcd(a: &BigUint, b: &BigUint) -> BigUint {
    a.gcd(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fi(n: u64) -> FactoredInteger {
        factorize_u64(n).unwrap()
    }

    fn pairs(f: &FactoredInteger) -> Vec<(u64, u32)> {
        f.factors()
            .iter()
            .map(|pp| (pp.prime.to_u64().unwrap(), pp.exponent))
            .collect()
    }

    #[test]
    fn factorize_examples() {
        assert!(fi(1).factors().is_empty());
        assert_eq!(fi(1).value(), &BigUint::one());
        assert_eq!(pairs(&fi(12)), vec![(2, 2), (3, 1)]);
        assert_eq!(pairs(&fi(2016)), vec![(2, 5), (3, 2), (7, 1)]);
        assert!(matches!(factorize(&BigUint::zero()), Err(Error::Argument(_))));
        let huge = BigUint::one() << 200u32;
        assert!(matches!(factorize(&huge), Err(Error::Resource { .. })));
    }

    #[test]
    fn divisor_examples() {
        let as_u64 = |v: Vec<BigUint>| v.into_iter().map(|d| d.to_u64().unwrap()).collect::<Vec<_>>();
        assert_eq!(as_u64(fi(12).divisors().unwrap()), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(as_u64(fi(1).divisors().unwrap()), vec![1]);
        assert_eq!(
            as_u64(fi(36).divisors().unwrap()),
            vec![1, 2, 3, 4, 6, 9, 12, 18, 36]
        );
        let err = fi(720_720).divisors_with_budget(100).unwrap_err();
        assert!(matches!(err, Error::Resource { ref needed, .. } if needed == "240"));
    }

    #[test]
    fn profile_examples() {
        let p = fi(12).profile();
        assert_eq!((p.tau.to_u64().unwrap(), p.omega, p.big_omega2, p.v_max), (6, 2, 5, 2));
        let p = fi(1).profile();
        assert_eq!((p.tau.to_u64().unwrap(), p.omega, p.big_omega2, p.v_max), (1, 0, 0, 0));
        let p = fi(2016).profile();
        assert_eq!((p.tau.to_u64().unwrap(), p.omega, p.big_omega2, p.v_max), (36, 3, 30, 5));
    }

    #[test]
    fn primes_above_examples() {
        let v = |m: u64, c: usize| {
            primes_above(&BigUint::from(m), c)
                .into_iter()
                .map(|p| p.to_u64().unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(v(10, 3), vec![11, 13, 17]);
        assert_eq!(v(2, 1), vec![3]);
        assert_eq!(v(100, 4), vec![101, 103, 107, 109]);
    }

    #[test]
    fn primes_above_agree_with_sieve() {
        let sieve = primes_up_to(200_000);
        for m in [2u64, 97, 1000, 65_521, 150_000] {
            let want: Vec<u64> = sieve.iter().copied().filter(|&p| p > m).take(25).collect();
            let got: Vec<u64> = primes_above(&BigUint::from(m), 25)
                .into_iter()
                .map(|p| p.to_u64().unwrap())
                .collect();
            assert_eq!(got, want, "M = {m}");
        }
    }

    #[test]
    fn tau_matches_divisor_count_exhaustively() {
        let sieve = SmallestFactorSieve::new(100_000);
        for n in 1..=100_000u32 {
            let f = FactoredInteger::from_sieve(n, &sieve);
            let d = f.divisors_u64().unwrap().unwrap();
            assert_eq!(BigUint::from(d.len()), f.tau(), "n = {n}");
            assert!(d.windows(2).all(|w| w[0] < w[1]));
            assert!(d.iter().all(|&x| u64::from(n) % x == 0));
        }
    }

    #[test]
    fn parse_ratio_forms() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(parse_ratio("0.4").unwrap(), r(2, 5));
        assert_eq!(parse_ratio("2/5").unwrap(), r(2, 5));
        assert_eq!(parse_ratio("-1.25e-1").unwrap(), r(-1, 8));
        assert_eq!(parse_ratio("3").unwrap(), r(3, 1));
        assert_eq!(parse_ratio(".5").unwrap(), r(1, 2));
        assert!(parse_ratio("abc").is_err());
        assert!(parse_ratio("1/0").is_err());
    }

    proptest! {
        #[test]
        fn factorization_round_trips(n in 1u64..u64::MAX) {
            let f = fi(n);
            prop_assert_eq!(f.value(), &BigUint::from(n));
            let again = FactoredInteger::from_prime_powers(
                f.factors().iter().map(|pp| (pp.prime.clone(), pp.exponent)),
            ).unwrap();
            prop_assert_eq!(&again, &f);
            prop_assert!(f.factors().windows(2).all(|w| w[0].prime < w[1].prime));
            prop_assert!(f.factors().iter().all(|pp| pp.exponent >= 1 && is_probable_prime(&pp.prime)));
            prop_assert_eq!(factorize(f.value()).unwrap(), f);
        }

        #[test]
        fn certified_decisions_survive_escalation(a in -1_000_000i64..1_000_000, b in 1i64..1_000_000, c in 1u64..1_000_000) {
            // Compare a/b against ln(c); once decided the answer never changes.
            let x = BigRational::new(a.into(), b.into());
            let mut first: Option<bool> = None;
            for bits in [32u32, 64, 128, 256, 512] {
                let lhs = HighPrecisionReal::from_ratio(&x, bits);
                let rhs = ln_integer(&BigUint::from(c), bits).unwrap();
                if let Some(d) = lhs.le(&rhs) {
                    if let Some(f) = first {
                        prop_assert_eq!(f, d);
                    }
                    first = Some(d);
                }
            }
            prop_assert_eq!(first, Some(ratio_to_f64(&x) <= (c as f64).ln()));
        }
    }
}
