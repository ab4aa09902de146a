//! Exact counts of divisors in closed windows `[X, X+Y]`, the reflection
//! identity, the spacing of large divisors, and the empirical scan of the
//! short-window counts `D_n(n^θ, n^(θ-ε))`.
//!
//! Window endpoints are never compared as floats. For integer divisors,
//! `X <= d <= X+Y` is equivalent to `ceil(X) <= d <= floor(X+Y)`, and both
//! integers are computed exactly: integer roots for `n^(p/q)`, and a
//! certified interval comparison for the one case where the fractional parts
//! of `n^θ` and `n^η` could carry into the integer part.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::power::{floor_power_small, small_ratio, RationalPower};
use crate::arith::{certainly, escalate, factorize_u64, FactoredInteger, HighPrecisionReal, SmallestFactorSieve};
use crate::error::{argument, Result};

/// A window `[X, X+Y]`, either as exponents of `n` or in absolute terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExponentWindow {
    /// `X = n^theta`, `Y = n^eta`.
    Exponent { theta: BigRational, eta: BigRational },
    /// Explicit `X` and `Y`.
    Absolute { x: BigRational, y: BigRational },
}

impl ExponentWindow {
    pub fn exponent(theta: BigRational, eta: BigRational) -> Result<Self> {
        if !theta.is_positive() || !eta.is_positive() {
            return Err(argument("window exponents must be positive"));
        }
        Ok(ExponentWindow::Exponent { theta, eta })
    }

    /// Exponent form for Theorem-1 style queries: `0 < eta < theta < 1`.
    pub fn short(theta: BigRational, eta: BigRational) -> Result<Self> {
        if !(eta.is_positive() && eta < theta && theta < BigRational::one()) {
            return Err(argument("expected 0 < eta < theta < 1"));
        }
        Ok(ExponentWindow::Exponent { theta, eta })
    }

    pub fn absolute(x: BigRational, y: BigRational) -> Result<Self> {
        if !x.is_positive() || y.is_negative() || y > x {
            return Err(argument("absolute window needs 0 <= Y <= X and X > 0"));
        }
        Ok(ExponentWindow::Absolute { x, y })
    }
}

/// Integer bounds of a window for a particular `n`.
///
/// `hi` is `floor(X+Y)` unless `carry` is set, in which case `floor(X+Y)` is
/// either `hi` or `hi + 1` and is only decided when `hi + 1` matters.
#[derive(Clone, Debug)]
pub(crate) struct WindowBounds {
    pub lo: BigUint,
    pub hi: BigUint,
    carry: Option<(RationalPower, RationalPower)>,
}

impl WindowBounds {
    pub fn new(n: &BigUint, w: &ExponentWindow) -> Result<Self> {
        match w {
            ExponentWindow::Absolute { x, y } => {
                let lo = x.ceil().to_integer().to_biguint().unwrap_or_default();
                let hi = (x + y).floor().to_integer().to_biguint().unwrap_or_default();
                Ok(WindowBounds { lo, hi, carry: None })
            }
            ExponentWindow::Exponent { theta, eta } => {
                if let (Some(v), Some((tp, tq)), Some((ep, eq))) =
                    (n.to_u64(), small_ratio(theta), small_ratio(eta))
                {
                    if tp <= tq && ep <= eq {
                        let (a, a_exact) = floor_power_small(v, tp, tq);
                        let (b, b_exact) = floor_power_small(v, ep, eq);
                        let lo = if a_exact { a } else { a + 1 };
                        let carry = if a_exact || b_exact {
                            None
                        } else {
                            Some((RationalPower::new(n, theta)?, RationalPower::new(n, eta)?))
                        };
                        return Ok(WindowBounds {
                            lo: BigUint::from(lo),
                            hi: BigUint::from(a) + BigUint::from(b),
                            carry,
                        });
                    }
                }
                let x = RationalPower::new(n, theta)?;
                let y = RationalPower::new(n, eta)?;
                let a = x.floor()?;
                let b = y.floor()?;
                let lo = x.ceil()?;
                let carry = if x.exact().is_some() || y.exact().is_some() {
                    None
                } else {
                    Some((x, y))
                };
                Ok(WindowBounds { lo, hi: a + b, carry })
            }
        }
    }

    /// Settles `floor(X+Y)` exactly.
    pub fn resolve(&mut self) -> Result<()> {
        if let Some((x, y)) = self.carry.take() {
            let next = &self.hi + 1u32;
            let target = HighPrecisionReal::from_biguint(&next, 64);
            let reaches = escalate(|bits| {
                let sum = &x.interval(bits)? + &y.interval(bits)?;
                certainly(target.le(&sum))
            })?;
            if reaches {
                self.hi = next;
            }
        }
        Ok(())
    }

    /// Resolves only if the carry candidate satisfies `is_divisor`.
    fn resolve_if(&mut self, is_divisor: impl FnOnce(&BigUint) -> bool) -> Result<()> {
        if self.carry.is_some() {
            let next = &self.hi + 1u32;
            if is_divisor(&next) {
                self.resolve()?;
            } else {
                self.carry = None;
            }
        }
        Ok(())
    }

    fn count_u64(&self, divisors: &[u64]) -> u64 {
        let Some(lo) = self.lo.to_u64() else { return 0 };
        let hi = self.hi.to_u64().unwrap_or(u64::MAX);
        if lo > hi {
            return 0;
        }
        let a = divisors.partition_point(|&d| d < lo);
        let b = divisors.partition_point(|&d| d <= hi);
        (b - a) as u64
    }
}

/// Number of divisors of `n` in `[X, X+Y]`, endpoints included.
pub fn count_window(n: &FactoredInteger, w: &ExponentWindow) -> Result<u64> {
    if let Some(divs) = n.divisors_u64()? {
        return count_window_sorted(n.value(), &divs, w);
    }
    let divs = n.divisors()?;
    let mut b = WindowBounds::new(n.value(), w)?;
    b.resolve_if(|c| divs.binary_search(c).is_ok())?;
    if b.lo > b.hi {
        return Ok(0);
    }
    let a = divs.partition_point(|d| d < &b.lo);
    let z = divs.partition_point(|d| d <= &b.hi);
    Ok((z - a) as u64)
}

/// [`count_window`] against a precomputed sorted divisor list.
pub fn count_window_sorted(n: &BigUint, divisors: &[u64], w: &ExponentWindow) -> Result<u64> {
    let mut b = WindowBounds::new(n, w)?;
    b.resolve_if(|c| c.to_u64().is_some_and(|c| divisors.binary_search(&c).is_ok()))?;
    Ok(b.count_u64(divisors))
}

/// Exact integer window `[ceil(X), floor(X+Y)]` for `n`.
pub fn integer_window(n: &BigUint, w: &ExponentWindow) -> Result<(BigUint, BigUint)> {
    let mut b = WindowBounds::new(n, w)?;
    b.resolve()?;
    Ok((b.lo, b.hi))
}

/// Checks `D_n(X,Y) = D_n(n/(X+Y), Yn/(X(X+Y)))` by counting both sides.
pub fn reflection_check(n: &FactoredInteger, x: &BigRational, y: &BigRational) -> Result<bool> {
    let direct = ExponentWindow::absolute(x.clone(), y.clone())?;
    let nn = BigRational::from_integer(n.value().clone().into());
    let sum = x + y;
    let rx = &nn / &sum;
    let ry = y * &nn / (x * &sum);
    let reflected = ExponentWindow::Absolute { x: rx, y: ry };
    Ok(count_window(n, &direct)? == count_window(n, &reflected)?)
}

/// For consecutive divisors `d < d+h` with `d >= sqrt(n)`, checks `h > d²/n`.
pub fn gap_check(n: &FactoredInteger) -> Result<bool> {
    if let Some(divs) = n.divisors_u64()? {
        let nv = u128::from(n.to_u64().unwrap());
        return Ok(divs.windows(2).all(|w| {
            let (d, e) = (u128::from(w[0]), u128::from(w[1]));
            d * d < nv || (e - d) * nv > d * d
        }));
    }
    let divs = n.divisors()?;
    let nv = n.value();
    Ok(divs.windows(2).all(|w| {
        let d2 = &w[0] * &w[0];
        &d2 < nv || (&w[1] - &w[0]) * nv > d2
    }))
}

/// One record of a running-maximum table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanRow {
    pub n: u64,
    pub count: u64,
}

/// Result of [`conjecture_scan`]: the `n` at which `D_n(n^θ, n^(θ-ε))` set a
/// new maximum, in increasing `n`, plus any per-`n` failures.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanTable {
    pub rows: Vec<ScanRow>,
    pub errors: Vec<(u64, String)>,
    pub scanned: u64,
}

impl ScanTable {
    pub fn max(&self) -> Option<&ScanRow> {
        self.rows.last()
    }

    /// CSV with header `n,count,theta,epsilon`; `theta` and `epsilon` are
    /// written verbatim.
    pub fn to_csv(&self, theta: &str, epsilon: &str) -> String {
        let mut out = String::from("n,count,theta,epsilon\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.n, r.count, theta, epsilon));
        }
        out
    }
}

/// Running maxima of `D_n(n^θ, n^(θ-ε))` over `n` in `start..=end`.
pub fn conjecture_scan(start: u64, end: u64, theta: &BigRational, epsilon: &BigRational) -> Result<ScanTable> {
    if !(epsilon.is_positive() && epsilon < theta && theta < &BigRational::one()) {
        return Err(argument("scan needs 0 < epsilon < theta < 1"));
    }
    if start == 0 || start > end {
        return Err(argument("scan range must be 1 <= start <= end"));
    }
    let w = ExponentWindow::Exponent {
        theta: theta.clone(),
        eta: theta - epsilon,
    };
    let sieve = (end <= 50_000_000).then(|| SmallestFactorSieve::new(end as u32));
    let counts: Vec<(u64, Result<u64>)> = (start..=end)
        .into_par_iter()
        .map(|n| {
            let f = match &sieve {
                Some(s) => Ok(FactoredInteger::from_sieve(n as u32, s)),
                None => factorize_u64(n),
            };
            (n, f.and_then(|f| count_window(&f, &w)))
        })
        .collect();
    let mut table = ScanTable {
        rows: Vec::new(),
        errors: Vec::new(),
        scanned: end - start + 1,
    };
    let mut best: Option<u64> = None;
    for (n, c) in counts {
        match c {
            Ok(c) => {
                if best.is_none_or(|b| c > b) {
                    best = Some(c);
                    table.rows.push(ScanRow { n, count: c });
                }
            }
            Err(e) => table.errors.push((n, e.to_string())),
        }
    }
    Ok(table)
}
