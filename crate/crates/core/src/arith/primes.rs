//! Prime generation and primality testing.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// All primes `<= limit`, ascending.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Smallest-prime-factor table for batch factorization of every integer up
/// to a limit.
#[derive(Clone, Debug)]
pub struct SmallestFactorSieve {
    spf: Vec<u32>,
}

impl SmallestFactorSieve {
    pub fn new(limit: u32) -> Self {
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] != 0 {
                continue;
            }
            spf[i] = i as u32;
            let mut j = i.saturating_mul(i);
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
        SmallestFactorSieve { spf }
    }

    pub fn limit(&self) -> u32 {
        (self.spf.len() - 1) as u32
    }

    /// Prime factorization of `n` as ascending `(prime, exponent)` pairs.
    ///
    /// # Panics
    /// If `n` is zero or above the sieve limit.
    pub fn factor_pairs(&self, n: u32) -> Vec<(u32, u32)> {
        assert!(n >= 1 && n <= self.limit(), "{n} outside sieve range");
        let mut out: Vec<(u32, u32)> = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.spf[m as usize];
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin with the first twenty prime bases. Exact below 3.3e24 (the
/// first thirteen bases already suffice there); a strong probable-prime test
/// above that.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    let bases: [u32; 20] = [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
    ];
    for &p in &bases {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for &a in &bases {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The `count` smallest primes strictly greater than `m`, ascending.
pub fn primes_above(m: &BigUint, count: usize) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(count);
    let mut c = m + 1u32;
    if count == 0 {
        return out;
    }
    if c <= BigUint::from(2u32) {
        out.push(BigUint::from(2u32));
        c = BigUint::from(3u32);
    } else if c.is_even() {
        c += 1u32;
    }
    while out.len() < count {
        if is_probable_prime(&c) {
            out.push(c.clone());
        }
        c += 2u32;
    }
    out
}

/// The `count` largest primes `<= m`, ascending; fewer if the primes run out.
pub fn primes_at_most(m: &BigUint, count: usize) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(count);
    let mut c = m.clone();
    while out.len() < count && c >= BigUint::from(2u32) {
        if is_probable_prime(&c) {
            out.push(c.clone());
        }
        c -= 1u32;
    }
    out.reverse();
    out
}
