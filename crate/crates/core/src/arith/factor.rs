//! Deterministic factorization: trial division, then Pollard-Brent rho with a
//! fixed sequence of polynomial constants.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::primes::{is_prime_u64, is_probable_prime};

const TRIAL_LIMIT: u64 = 1000;

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

fn rho_u64(n: u64) -> u64 {
    debug_assert!(n > 3 && !is_prime_u64(n));
    if n.is_multiple_of(2) {
        return 2;
    }
    let mulmod = |a: u64, b: u64| ((u128::from(a) * u128::from(b)) % u128::from(n)) as u64;
    for c in 1u64.. {
        let f = |x: u64| ((u128::from(mulmod(x, x)) + u128::from(c)) % u128::from(n)) as u64;
        let (mut x, mut y, mut ys) = (2u64, 2u64, 2u64);
        let (mut q, mut g, mut r) = (1u64, 1u64, 1u64);
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mulmod(q, x.abs_diff(y));
                }
                g = gcd_u64(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

fn rho_big(n: &BigUint) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u32);
    }
    let one = BigUint::one();
    for c in 1u32.. {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let two = BigUint::from(2u32);
        let (mut x, mut y, mut ys) = (two.clone(), two.clone(), two);
        let (mut q, mut g) = (one.clone(), one.clone());
        let mut r: u64 = 1;
        const BATCH: u64 = 64;
        let diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..BATCH.min(r - k) {
                    y = f(&y);
                    q = (&q * diff(&x, &y)) % n;
                }
                g = q.gcd(n);
                k += BATCH;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                g = diff(&x, &ys).gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
    }
    unreachable!()
}

fn split_into(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if let Some(v) = n.to_u64() {
        if is_prime_u64(v) {
            out.push(n);
            return;
        }
        let d = rho_u64(v);
        split_into(BigUint::from(d), out);
        split_into(BigUint::from(v / d), out);
        return;
    }
    if is_probable_prime(&n) {
        out.push(n);
        return;
    }
    let d = rho_big(&n);
    let rest = &n / &d;
    split_into(d, out);
    split_into(rest, out);
}

/// Ascending `(prime, exponent)` pairs of `n >= 1`.
pub(crate) fn prime_factor_pairs(n: &BigUint) -> Vec<(BigUint, u32)> {
    debug_assert!(!n.is_zero());
    let mut rest = n.clone();
    let mut pairs: Vec<(BigUint, u32)> = Vec::new();
    let mut p = 2u64;
    while p < TRIAL_LIMIT {
        let bp = BigUint::from(p);
        if &bp * &bp > rest {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            pairs.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut big = Vec::new();
    split_into(rest, &mut big);
    big.sort();
    for q in big {
        match pairs.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => pairs.push((q, 1)),
        }
    }
    pairs.sort();
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(n: u64) -> Vec<(u64, u32)> {
        prime_factor_pairs(&BigUint::from(n))
            .into_iter()
            .map(|(p, e)| (p.to_u64().unwrap(), e))
            .collect()
    }

    #[test]
    fn trial_range() {
        assert_eq!(pairs(1), vec![]);
        assert_eq!(pairs(12), vec![(2, 2), (3, 1)]);
        assert_eq!(pairs(2016), vec![(2, 5), (3, 2), (7, 1)]);
        assert_eq!(pairs(997 * 997), vec![(997, 2)]);
    }

    #[test]
    fn rho_range() {
        let p = 1_000_000_007u64;
        let q = 998_244_353u64;
        assert_eq!(pairs(p * q), vec![(q, 1), (p, 1)]);
        assert_eq!(pairs(p * p), vec![(p, 2)]);
        assert_eq!(pairs(1009 * 1013 * 1019), vec![(1009, 1), (1013, 1), (1019, 1)]);
    }

    #[test]
    fn beyond_u64() {
        let p = BigUint::from(18_446_744_073_709_551_557u64);
        let q = BigUint::from(4_294_967_311u64);
        let n = &p * &q * &q;
        assert_eq!(prime_factor_pairs(&n), vec![(q, 2), (p, 1)]);
    }
}
