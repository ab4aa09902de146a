//! The convex pair `f(x) = an/x + bx`, `f*(x) = an/x - bx`, the residue
//! classes that `f(d)` must avoid because `f*(d)² = f(d)² - 4abn` is a
//! square, and the large-sieve bound those classes give.
//!
//! For an odd prime `p` write `4abn = p^v·U` with `p ∤ U`. Then
//! `f(d)² + p^v·u` is a square mod `p^(v+1)` with `u ≡ -U (mod p)`, so `f(d)`
//! avoids the `S_v` residues for which it is not.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::primes::{is_prime_u64, primes_up_to, SmallestFactorSieve};
use crate::arith::{ratio_to_f64, FactoredInteger};
use crate::error::{argument, Error, Result};

/// Enumeration cap for [`unsolvable_bruteforce`].
pub const BRUTEFORCE_BUDGET: u64 = 1_000_000;

/// `(f(d), f*(d)) = (an/d + bd, an/d - bd)` for a divisor `d` of `n`.
pub fn f_values(n: &FactoredInteger, a: &BigUint, b: &BigUint, d: &BigUint) -> Result<(BigInt, BigInt)> {
    if d.is_zero() || !(n.value() % d).is_zero() {
        return Err(argument(format!("{d} does not divide {}", n.value())));
    }
    let q = BigInt::from(a * (n.value() / d));
    let r = BigInt::from(b * d);
    Ok((&q + &r, q - r))
}

fn pow_mod(b: u64, e: u64, m: u64) -> u64 {
    BigUint::from(b).modpow(&BigUint::from(e), &BigUint::from(m)).to_u64().unwrap()
}

/// Legendre symbol `(a/p)` for an odd prime `p`, by Euler's criterion.
pub fn legendre(a: i64, p: u64) -> i32 {
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

fn check_odd_prime_unit(p: u64, u: i64) -> Result<()> {
    if p < 3 || !is_prime_u64(p) {
        return Err(argument(format!("{p} is not an odd prime")));
    }
    if u.rem_euclid(p as i64) == 0 {
        return Err(argument(format!("{p} divides u = {u}")));
    }
    Ok(())
}

/// `S_v`: the number of `x mod p^(v+1)` with `x² + p^v·u ≡ y²` unsolvable, by
/// the recurrence `S_0 = (p - (-u/p))/2`, `S_1 = p`, `S_v = p·S_(v-2)`.
pub fn count_unsolvable(p: u64, v: u32, u: i64) -> Result<u64> {
    check_odd_prime_unit(p, u)?;
    let base = match v % 2 {
        0 => (p as i64 - i64::from(legendre(-u, p))) as u64 / 2,
        _ => p,
    };
    p.checked_pow(v / 2)
        .and_then(|k| k.checked_mul(base))
        .ok_or_else(|| argument("S_v overflows 64 bits"))
}

/// Counts the same `S_v` by listing every `x mod p^(v+1)` against a table of
/// squares.
pub fn unsolvable_bruteforce(p: u64, v: u32, u: i64) -> Result<u64> {
    check_odd_prime_unit(p, u)?;
    let m = p
        .checked_pow(v + 1)
        .filter(|&m| m <= BRUTEFORCE_BUDGET)
        .ok_or(Error::Resource {
            what: "brute-force modulus p^(v+1)",
            needed: format!("{p}^{}", v + 1),
            budget: BRUTEFORCE_BUDGET.to_string(),
        })?;
    let mut square = vec![false; m as usize];
    for y in 0..m {
        square[(y * y % m) as usize] = true;
    }
    let shift = (p.pow(v) as u128 * u.rem_euclid(m as i64) as u128 % u128::from(m)) as u64;
    Ok((0..m).filter(|&x| !square[((x * x % m + shift) % m) as usize]).count() as u64)
}

/// Whether `c` is a square modulo `p^k` for an odd prime `p`.
pub fn is_square_mod_prime_power(c: &BigInt, p: u64, k: u32) -> bool {
    let m = BigInt::from(p).pow(k);
    let mut c = c.mod_floor(&m);
    if c.is_zero() {
        return true;
    }
    let bp = BigInt::from(p);
    let mut e = 0;
    while (&c % &bp).is_zero() {
        c /= &bp;
        e += 1;
    }
    // With p odd and p ∤ c', p^e·c' is a square mod p^k (e < k) iff e is even
    // and c' is a square mod p, by Hensel lifting.
    e % 2 == 0 && legendre((&c % &bp).to_i64().unwrap(), p) == 1
}

/// One sieving modulus `𝔭 = p^exponent` with `excluded = |Ω_𝔭|` classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SieveModulus {
    pub prime: u64,
    pub exponent: u32,
    pub modulus: u64,
    pub excluded: u64,
    /// The unit `u mod p` in `x² + p^(exponent-1)·u`.
    pub unit: u64,
}

impl SieveModulus {
    fn h(&self) -> BigRational {
        BigRational::new(self.excluded.into(), (self.modulus - self.excluded).into())
    }
}

/// The moduli `𝒫`, cutoff `Q`, and `H = Σ_{q<=Q} h(q)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SieveSpec {
    pub moduli: Vec<SieveModulus>,
    pub q: u64,
    #[serde(serialize_with = "crate::report::ratio")]
    pub h_total: BigRational,
}

impl SieveSpec {
    /// Moduli given explicitly; `H` is summed here.
    pub fn new(mut moduli: Vec<SieveModulus>, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(argument("Q must be at least 1"));
        }
        moduli.sort_by_key(|m| m.prime);
        if moduli.windows(2).any(|w| w[0].prime == w[1].prime) {
            return Err(argument("sieve moduli must be powers of distinct primes"));
        }
        if moduli.iter().any(|m| m.excluded >= m.modulus || m.prime.pow(m.exponent) != m.modulus) {
            return Err(argument("each modulus needs 0 <= |Omega| < p^exponent"));
        }
        let mut spec = SieveSpec {
            moduli,
            q,
            h_total: BigRational::zero(),
        };
        let sieve = SmallestFactorSieve::new(u32::try_from(q).map_err(|_| argument("Q too large"))?);
        spec.h_total = (1..=q as u32).map(|k| spec.weight_with(k, &sieve)).sum();
        Ok(spec)
    }

    /// The moduli built from `4abn`: for every odd prime `p <= Q`, the modulus
    /// `p^(v_p(4abn)+1)` with its `S_v` excluded classes.
    pub fn for_product(four_abn: &BigUint, q: u64) -> Result<Self> {
        let mut moduli = Vec::new();
        for p in primes_up_to(q).into_iter().filter(|&p| p > 2) {
            let bp = BigUint::from(p);
            let mut rest = four_abn.clone();
            let mut v = 0u32;
            while (&rest % &bp).is_zero() {
                rest /= &bp;
                v += 1;
            }
            let Some(modulus) = p.checked_pow(v + 1) else {
                continue;
            };
            let big_u = (&rest % &bp).to_u64().unwrap();
            let unit = p - big_u;
            let excluded = count_unsolvable(p, v, unit as i64)?;
            moduli.push(SieveModulus {
                prime: p,
                exponent: v + 1,
                modulus,
                excluded,
                unit,
            });
        }
        SieveSpec::new(moduli, q)
    }

    fn weight_with(&self, k: u32, sieve: &SmallestFactorSieve) -> BigRational {
        let mut w = BigRational::one();
        for (p, e) in sieve.factor_pairs(k) {
            match self.moduli.iter().find(|m| m.prime == u64::from(p)) {
                Some(m) if m.exponent == e => w *= m.h(),
                _ => return BigRational::zero(),
            }
        }
        w
    }
}

/// `h(q)`: the product of `h(𝔭)` over the prime-power components of `q`,
/// zero unless each component is exactly a modulus of the spec.
pub fn weight_h(spec: &SieveSpec, q: u64) -> Result<BigRational> {
    let k = u32::try_from(q).map_err(|_| argument("q too large"))?;
    if k == 0 {
        return Err(argument("q must be positive"));
    }
    Ok(spec.weight_with(k, &SmallestFactorSieve::new(k)))
}

/// `(N + Q²)/H`.
pub fn large_sieve_bound(spec: &SieveSpec, n: &BigRational) -> BigRational {
    let q = BigRational::from_integer(spec.q.into());
    (n + &q * &q) / &spec.h_total
}

/// Everything checked about one window `[x₀, x₀ + √(i x₀/b)]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SieveReport {
    pub count: u64,
    pub cap_elementary: u64,
    #[serde(serialize_with = "crate::report::ratio")]
    pub cap_sieve: BigRational,
    #[serde(rename = "Q")]
    pub q: u64,
    #[serde(rename = "H", serialize_with = "crate::report::ratio")]
    pub h_total: BigRational,
    pub moduli: Vec<SieveModulus>,
    /// Every `f(d)` with `d >= x₀` avoids every excluded class.
    pub avoids_classes: bool,
    /// `f` takes distinct values on the divisors `d >= x₀`.
    pub injective: bool,
    /// `f(d)² - f*(d)² = 4abn` at every divisor.
    pub identity_holds: bool,
}

impl SieveReport {
    pub fn passed(&self) -> bool {
        let c = BigRational::from_integer(self.count.into());
        self.count <= self.cap_elementary
            && c <= self.cap_sieve
            && self.avoids_classes
            && self.injective
            && self.identity_holds
    }

    pub fn cap_sieve_f64(&self) -> f64 {
        ratio_to_f64(&self.cap_sieve)
    }
}

/// Counts divisors in `[x₀, x₀ + √(i x₀/b)]` with `x₀ = √(an/b)` and checks
/// them against both caps.
///
/// Membership is exact: `d >= x₀` iff `bd² >= an`, and then
/// `d <= x₀ + √(i x₀/b)` iff `b(bd² + an)² <= (2bd + i)²·an`.
pub fn sieve_window_check(n: &FactoredInteger, a: u64, b: u64, i: u64, q: u64) -> Result<SieveReport> {
    if a == 0 || b == 0 || a.gcd(&b) != 1 {
        return Err(argument("a and b must be coprime positive integers"));
    }
    let (ab, bb) = (BigUint::from(a), BigUint::from(b));
    let an = &ab * n.value();
    let four_abn = &an * &bb * 4u32;
    let spec = SieveSpec::for_product(&four_abn, q)?;
    let divs = n.divisors()?;
    let mut count = 0;
    let mut avoids = true;
    let mut identity = true;
    let mut seen = Vec::new();
    for d in &divs {
        let (f, fs) = f_values(n, &ab, &bb, d)?;
        identity &= &f * &f - &fs * &fs == BigInt::from(four_abn.clone());
        let bd2 = &bb * d * d;
        if bd2 < an {
            continue;
        }
        seen.push(f.clone());
        for m in &spec.moduli {
            let shift = BigInt::from(m.modulus / m.prime) * BigInt::from(m.unit);
            avoids &= is_square_mod_prime_power(&(&f * &f + shift), m.prime, m.exponent);
        }
        let lhs = &bb * (&bd2 + &an).pow(2);
        let rhs = (&bb * d * 2u32 + i).pow(2) * &an;
        if lhs <= rhs {
            count += 1;
        }
    }
    seen.sort();
    let injective = seen.windows(2).all(|w| w[0] != w[1]);
    let cap_sieve = large_sieve_bound(&spec, &BigRational::from_integer((i + 1).into()));
    Ok(SieveReport {
        count,
        cap_elementary: i + 1,
        cap_sieve,
        q,
        h_total: spec.h_total.clone(),
        moduli: spec.moduli,
        avoids_classes: avoids,
        injective,
        identity_holds: identity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factorize_u64;
    use proptest::prelude::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn f_examples() {
        let n = factorize_u64(36).unwrap();
        assert_eq!(f_values(&n, &big(1), &big(1), &big(6)).unwrap(), (12.into(), 0.into()));
        let n = factorize_u64(12).unwrap();
        assert_eq!(f_values(&n, &big(1), &big(1), &big(3)).unwrap(), (7.into(), 1.into()));
        assert_eq!(f_values(&n, &big(3), &big(1), &big(6)).unwrap(), (12.into(), 0.into()));
        assert!(f_values(&n, &big(1), &big(1), &big(5)).is_err());
    }

    #[test]
    fn unsolvable_examples() {
        assert_eq!(count_unsolvable(3, 0, 1).unwrap(), 2);
        assert_eq!(count_unsolvable(5, 1, 2).unwrap(), 5);
        assert_eq!(count_unsolvable(3, 2, 1).unwrap(), 6);
        assert_eq!(unsolvable_bruteforce(3, 0, 1).unwrap(), 2);
        assert_eq!(unsolvable_bruteforce(5, 1, 2).unwrap(), 5);
        assert_eq!(unsolvable_bruteforce(7, 3, 3).unwrap(), 49);
        assert!(count_unsolvable(4, 0, 1).is_err());
        assert!(count_unsolvable(5, 0, 10).is_err());
        assert!(unsolvable_bruteforce(13, 5, 1).is_err());
    }

    #[test]
    fn recurrence_matches_bruteforce_on_small_moduli() {
        for p in [3u64, 5, 7, 11, 13, 17] {
            for v in 0..4 {
                if p.pow(v + 1) > 100_000 {
                    continue;
                }
                for u in 1..p as i64 {
                    assert_eq!(count_unsolvable(p, v, u).unwrap(), unsolvable_bruteforce(p, v, u).unwrap(), "{p} {v} {u}");
                }
            }
        }
    }

    #[test]
    fn square_predicate_matches_table() {
        for (p, k) in [(3u64, 1u32), (3, 3), (5, 2), (7, 2), (3, 5)] {
            let m = p.pow(k);
            let squares: std::collections::HashSet<u64> = (0..m).map(|y| y * y % m).collect();
            for c in 0..m {
                assert_eq!(is_square_mod_prime_power(&BigInt::from(c), p, k), squares.contains(&c), "{c} mod {p}^{k}");
            }
        }
    }

    #[test]
    fn weight_examples() {
        let spec = SieveSpec::new(vec![], 1).unwrap();
        assert_eq!(weight_h(&spec, 1).unwrap(), BigRational::one());
        assert_eq!(large_sieve_bound(&spec, &BigRational::from_integer(10.into())), BigRational::from_integer(11.into()));
        let nine = SieveModulus { prime: 3, exponent: 2, modulus: 9, excluded: 3, unit: 1 };
        let spec = SieveSpec::new(vec![nine], 9).unwrap();
        assert_eq!(spec.h_total, BigRational::new(3.into(), 2.into()));
        assert_eq!(weight_h(&spec, 3).unwrap(), BigRational::zero());
        assert_eq!(weight_h(&spec, 9).unwrap(), BigRational::new(1.into(), 2.into()));
        let b = large_sieve_bound(&spec, &BigRational::from_integer(19.into()));
        assert_eq!(b, BigRational::new(200.into(), 3.into()));
    }

    #[test]
    fn h_at_p_squared() {
        // 4abn divisible exactly once by p: modulus p², |Ω| = S_1 = p.
        for p in [3u64, 5, 7, 11] {
            let spec = SieveSpec::for_product(&big(4 * p), p * p).unwrap();
            let m = spec.moduli.iter().find(|m| m.prime == p).unwrap();
            assert_eq!((m.modulus, m.excluded), (p * p, p));
            assert_eq!(weight_h(&spec, p * p).unwrap(), BigRational::new(1.into(), (p - 1).into()));
            assert_eq!(weight_h(&spec, p).unwrap(), BigRational::zero());
        }
    }

    #[test]
    fn window_examples() {
        let r = sieve_window_check(&factorize_u64(36).unwrap(), 1, 1, 2, 1).unwrap();
        assert!(r.count <= 3 && r.passed(), "{r:?}");
        let r = sieve_window_check(&factorize_u64(1_000_003).unwrap(), 2, 3, 5, 20).unwrap();
        assert!(r.count <= 1 && r.passed());
        let r = sieve_window_check(&factorize_u64(44_100).unwrap(), 1, 1, 4, 10).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = sieve_window_check(&factorize_u64(210).unwrap(), 1, 1, 3, 30).unwrap();
        assert!(r.passed() && r.h_total > BigRational::one());
    }

    #[test]
    fn window_count_matches_float_membership() {
        for n in [720u64, 5040, 44_100, 360_360] {
            let f = factorize_u64(n).unwrap();
            for (a, b, i) in [(1u64, 1u64, 3u64), (2, 3, 7), (5, 2, 10)] {
                let r = sieve_window_check(&f, a, b, i, 5).unwrap();
                let x0 = ((a * n) as f64 / b as f64).sqrt();
                let hi = x0 + (i as f64 * x0 / b as f64).sqrt();
                let want = f
                    .divisors_u64()
                    .unwrap()
                    .unwrap()
                    .into_iter()
                    .filter(|&d| (d as f64) >= x0 - 1e-9 && (d as f64) <= hi + 1e-9)
                    .count() as u64;
                assert_eq!(r.count, want, "{n} {a} {b} {i}");
            }
        }
    }

    #[test]
    fn h_grows_with_q() {
        let four_abn = big(4 * 2 * 3 * 5 * 7 * 11);
        let mut last = BigRational::zero();
        for q in 1..60 {
            let h = SieveSpec::for_product(&four_abn, q).unwrap().h_total;
            assert!(h >= last);
            last = h;
        }
    }

    #[test]
    fn wrong_sign_is_caught() {
        // With u = +4abn/p^v the classes are wrong for p ≡ 3 (mod 4): some
        // f(d) would land in them.
        let n = factorize_u64(5040).unwrap();
        let four_abn = big(4 * 5040);
        let p = 11u64;
        let m = p;
        let unit_wrong = (4 * 5040 % p) as i64;
        let hits = n
            .divisors()
            .unwrap()
            .iter()
            .filter(|d| {
                let (f, _) = f_values(&n, &big(1), &big(1), d).unwrap();
                !is_square_mod_prime_power(&(&f * &f + BigInt::from(unit_wrong)), p, 1)
            })
            .count();
        assert!(hits > 0);
        let spec = SieveSpec::for_product(&four_abn, 11).unwrap();
        let right = spec.moduli.iter().find(|x| x.prime == p).unwrap();
        assert_eq!(right.modulus, m);
        assert_eq!(right.unit as i64, (p as i64 - unit_wrong) % p as i64);
    }

    proptest! {
        #[test]
        fn alg_identity(n in 1u64..200_000, a in 1u64..20, b in 1u64..20) {
            prop_assume!(a.gcd(&b) == 1);
            let f = factorize_u64(n).unwrap();
            let four = BigInt::from(4 * a * b * n);
            for d in f.divisors().unwrap() {
                let (x, y) = f_values(&f, &big(a), &big(b), &d).unwrap();
                prop_assert_eq!(&x * &x - &y * &y, four.clone());
            }
        }

        #[test]
        fn window_reports_pass(n in 1u64..1_000_000, a in 1u64..=10, b in 1u64..=10, i in 1u64..=10, q in 1u64..=50) {
            prop_assume!(a.gcd(&b) == 1);
            let r = sieve_window_check(&factorize_u64(n).unwrap(), a, b, i, q).unwrap();
            prop_assert!(r.passed(), "{:?}", r);
        }
    }
}
