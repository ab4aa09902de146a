//! The exponents ξ(θ,η), α(θ,η), α(θ,η,δ) and the explicit cap on
//! `D_n(n^θ, n^(θ²-ε))`.
//!
//! ξ and α(θ,η) are rational whenever θ and η are, so they are computed
//! exactly. α(θ,η,δ) is either rational or the positive root of a quadratic
//! with rational coefficients; it is kept in that form so every comparison
//! against a rational is exact.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{ratio_to_f64, FactoredInteger, HighPrecisionReal};
use crate::error::{argument, Error, Result};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn half() -> BigRational {
    rat(1, 2)
}

/// Which branch of the piecewise definition produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExponentCase {
    EtaLeThetaSq,
    SmallThetaFar,
    SmallThetaNear,
    LargeThetaFar,
    LargeThetaNear,
}

impl ExponentCase {
    pub fn label(self) -> &'static str {
        match self {
            ExponentCase::EtaLeThetaSq => "ETA_LE_THETA_SQ",
            ExponentCase::SmallThetaFar => "SMALL_THETA_FAR",
            ExponentCase::SmallThetaNear => "SMALL_THETA_NEAR",
            ExponentCase::LargeThetaFar => "LARGE_THETA_FAR",
            ExponentCase::LargeThetaNear => "LARGE_THETA_NEAR",
        }
    }
}

impl fmt::Display for ExponentCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PiecewiseExponent {
    #[serde(serialize_with = "crate::report::ratio")]
    pub value: BigRational,
    pub case_label: ExponentCase,
}

impl PiecewiseExponent {
    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.value)
    }
}

fn check_open_unit(theta: &BigRational, eta: &BigRational) -> Result<()> {
    if eta.is_positive() && eta < theta && theta < &BigRational::one() {
        Ok(())
    } else {
        Err(argument(format!("need 0 < eta < theta < 1, got theta={theta}, eta={eta}")))
    }
}

/// The four branches shared by ξ (above θ²) and α(θ,η).
fn upper_branches(theta: &BigRational, eta: &BigRational) -> PiecewiseExponent {
    let one = BigRational::one();
    let two = BigRational::from_integer(2.into());
    let four = BigRational::from_integer(4.into());
    let delta = &four * (theta - eta);
    if theta <= &half() {
        if &two * eta <= *theta {
            PiecewiseExponent {
                value: theta * theta / eta,
                case_label: ExponentCase::SmallThetaFar,
            }
        } else {
            PiecewiseExponent {
                value: delta,
                case_label: ExponentCase::SmallThetaNear,
            }
        }
    } else if &two * eta <= BigRational::from_integer(3.into()) * theta - &one {
        let c = (&one - theta) * (&one - theta);
        PiecewiseExponent {
            value: &c / (&c + eta - theta * theta),
            case_label: ExponentCase::LargeThetaFar,
        }
    } else {
        PiecewiseExponent {
            value: delta,
            case_label: ExponentCase::LargeThetaNear,
        }
    }
}

/// ξ(θ,η) for `0 < η < θ < 1`.
pub fn xi(theta: &BigRational, eta: &BigRational) -> Result<PiecewiseExponent> {
    check_open_unit(theta, eta)?;
    if eta <= &(theta * theta) {
        return Ok(PiecewiseExponent {
            value: BigRational::one(),
            case_label: ExponentCase::EtaLeThetaSq,
        });
    }
    Ok(upper_branches(theta, eta))
}

/// Closed form of the largest α with `(θ-t)² ≥ α(η-t)` on `[0, 1-α]`, for
/// `θ² ≤ η < θ < 1`.
pub fn alpha_closed_form(theta: &BigRational, eta: &BigRational) -> Result<PiecewiseExponent> {
    check_open_unit(theta, eta)?;
    if eta < &(theta * theta) {
        return Err(argument(format!("need theta^2 <= eta, got theta={theta}, eta={eta}")));
    }
    Ok(upper_branches(theta, eta))
}

/// Whether `(θ-t)² - α(η-t) >= -tol` at the `grid+1` uniform points of
/// `[0, 1-α]` and at the vertex `θ - α/2` when it lies inside.
pub fn alpha_feasible_f64(theta: f64, eta: f64, alpha: f64, grid: u32) -> bool {
    const TOL: f64 = 1e-13;
    let g = |t: f64| (theta - t) * (theta - t) - alpha * (eta - t);
    let end = 1.0 - alpha;
    if end < 0.0 {
        return false;
    }
    let vertex = theta - alpha / 2.0;
    if (0.0..=end).contains(&vertex) && g(vertex) < -TOL {
        return false;
    }
    (0..=grid).all(|j| g(f64::from(j) * end / f64::from(grid)) >= -TOL)
}

/// Numeric search for the largest feasible α in `(0, 1]`, by bisection to
/// `1e-8`. Shares nothing with [`alpha_closed_form`].
pub fn alpha_oracle(theta: f64, eta: f64, grid: u32) -> f64 {
    if alpha_feasible_f64(theta, eta, 1.0, grid) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if alpha_feasible_f64(theta, eta, mid, grid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Candidate {
    DeltaOver,
    Alpha0,
    Alpha1,
}

impl Candidate {
    pub fn label(self) -> &'static str {
        match self {
            Candidate::DeltaOver => "DELTA_OVER",
            Candidate::Alpha0 => "ALPHA0",
            Candidate::Alpha1 => "ALPHA1",
        }
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// An exact description of α(θ,η,δ).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlphaValue {
    Rational(BigRational),
    /// The positive root of `quad·α² + lin·α = constant`, all three positive.
    Root {
        quad: BigRational,
        lin: BigRational,
        constant: BigRational,
    },
}

impl AlphaValue {
    /// Exact comparison of the value against `x`.
    pub fn cmp_ratio(&self, x: &BigRational) -> Ordering {
        match self {
            AlphaValue::Rational(v) => v.cmp(x),
            AlphaValue::Root { quad, lin, constant } => {
                if !x.is_positive() {
                    return Ordering::Greater;
                }
                // The quadratic is increasing on α > 0, so its sign at x
                // places x relative to the root.
                (quad * x * x + lin * x).cmp(constant).reverse()
            }
        }
    }

    /// Certified enclosure.
    pub fn interval(&self, bits: u32) -> Result<HighPrecisionReal> {
        match self {
            AlphaValue::Rational(v) => Ok(HighPrecisionReal::from_ratio(v, bits)),
            AlphaValue::Root { quad, lin, constant } => {
                let a = HighPrecisionReal::from_ratio(quad, bits);
                let b = HighPrecisionReal::from_ratio(lin, bits);
                let c = HighPrecisionReal::from_ratio(constant, bits);
                root_interval(&a, &b, &c)
            }
        }
    }

    /// A rational not above the value, within `2^-bits` of it.
    pub fn lower_ratio(&self, bits: u32) -> Result<BigRational> {
        match self {
            AlphaValue::Rational(v) => Ok(v.clone()),
            AlphaValue::Root { .. } => Ok(self.interval(bits)?.lower()),
        }
    }
}

/// Positive root of `a·x² + b·x = c` in the cancellation-free form
/// `2c/(b + sqrt(b² + 4ac))`.
fn root_interval(a: &HighPrecisionReal, b: &HighPrecisionReal, c: &HighPrecisionReal) -> Result<HighPrecisionReal> {
    let disc = &(b * b) + &(a * c).mul_int(&BigInt::from(4));
    let den = b + &disc.sqrt()?;
    c.mul_int(&BigInt::from(2)).div(&den)
}

/// α(θ,η,δ) together with the branch that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaExponent {
    #[serde(serialize_with = "crate::report::real")]
    pub value: HighPrecisionReal,
    pub candidate: Candidate,
    #[serde(serialize_with = "crate::report::ratio")]
    pub epsilon_var: BigRational,
    #[serde(skip)]
    pub exact: AlphaValue,
}

fn delta_domain(theta: &BigRational, eta: &BigRational, delta: &BigRational) -> Result<BigRational> {
    check_open_unit(theta, eta)?;
    if !delta.is_positive() || delta > &BigRational::one() {
        return Err(argument(format!("need 0 < delta <= 1, got {delta}")));
    }
    let w = theta * (BigRational::one() - theta);
    let eps = &w * &w * delta;
    let floor = theta * theta - &eps;
    if !floor.is_positive() || eta < &floor {
        return Err(argument(format!(
            "need 0 < theta^2 - (theta(1-theta))^2 delta <= eta, got theta={theta}, eta={eta}, delta={delta}"
        )));
    }
    Ok(eps)
}

/// α(θ,η,δ) by the branch rule: α₀ when `θ <= 1/2` and `2η <= θ - 4θε`,
/// α₁ when `θ > 1/2` and `2η <= 3θ - 1 - 4(1-θ)ε`, else `Δ/(1+4ε)`, where
/// `ε = (θ(1-θ))²δ` and `Δ = 4(θ-η)`.
pub fn alpha_delta(theta: &BigRational, eta: &BigRational, delta: &BigRational) -> Result<DeltaExponent> {
    let eps = delta_domain(theta, eta, delta)?;
    let one = BigRational::one();
    let two = rat(2, 1);
    let four = rat(4, 1);
    let exact = if theta <= &half() {
        if &two * eta <= theta - &four * theta * &eps {
            Some((
                AlphaValue::Root {
                    quad: eps.clone(),
                    lin: eta.clone(),
                    constant: theta * theta,
                },
                Candidate::Alpha0,
            ))
        } else {
            None
        }
    } else if &two * eta <= rat(3, 1) * theta - &one - &four * (&one - theta) * &eps {
        let c = (&one - theta) * (&one - theta);
        Some((
            AlphaValue::Root {
                quad: eps.clone(),
                lin: &one - &two * theta + eta,
                constant: c,
            },
            Candidate::Alpha1,
        ))
    } else {
        None
    };
    let (exact, candidate) = exact.unwrap_or_else(|| {
        let big_delta = &four * (theta - eta);
        (
            AlphaValue::Rational(big_delta / (&one + &four * &eps)),
            Candidate::DeltaOver,
        )
    });
    Ok(DeltaExponent {
        value: exact.interval(crate::arith::default_precision())?,
        candidate,
        epsilon_var: eps,
        exact,
    })
}

/// α(θ,η,δ) for an irrational δ known only as an interval. Returns
/// `Undecided` when the branch choice cannot be settled at this precision.
pub(crate) fn alpha_delta_interval(
    theta: &BigRational,
    eta: &BigRational,
    delta: &HighPrecisionReal,
) -> Result<(HighPrecisionReal, Candidate)> {
    let bits = delta.bits();
    let q = |r: &BigRational| HighPrecisionReal::from_ratio(r, bits);
    let one = BigRational::one();
    let w = theta * (&one - theta);
    let eps = &q(&(&w * &w)) * delta;
    let four = BigInt::from(4);
    let two_eta = q(&(eta * rat(2, 1)));
    let (rhs, small) = if theta <= &half() {
        (&q(theta) - &(&eps * &q(theta)).mul_int(&four), true)
    } else {
        let base = rat(3, 1) * theta - &one;
        (&q(&base) - &(&eps * &q(&(&one - theta))).mul_int(&four), false)
    };
    let root_branch = two_eta.le(&rhs).ok_or(Error::Undecided)?;
    if root_branch {
        let (lin, constant, cand) = if small {
            (eta.clone(), theta * theta, Candidate::Alpha0)
        } else {
            (&one - rat(2, 1) * theta + eta, (&one - theta) * (&one - theta), Candidate::Alpha1)
        };
        return Ok((root_interval(&eps, &q(&lin), &q(&constant))?, cand));
    }
    let big_delta = q(&(rat(4, 1) * (theta - eta)));
    let den = &HighPrecisionReal::one(bits) + &eps.mul_int(&four);
    Ok((big_delta.div(&den)?, Candidate::DeltaOver))
}

/// `ξ - δ <= α(θ,η,δ) <= ξ`, decided exactly.
pub fn sandwich_holds(theta: &BigRational, eta: &BigRational, delta: &BigRational) -> Result<bool> {
    let x = xi(theta, eta)?.value;
    let a = alpha_delta(theta, eta, delta)?;
    Ok(a.exact.cmp_ratio(&x) != Ordering::Greater && a.exact.cmp_ratio(&(&x - delta)) != Ordering::Less)
}

/// Checks `(θ-t)² - α(η-t) - εα² >= 0` (the α²-scaled form of
/// `F(t) >= ε`) at `t_j = j(1-α)/grid`, `j = 0..=grid`, and at the vertex,
/// in exact integer arithmetic.
pub fn pr2_holds(theta: &BigRational, eta: &BigRational, eps: &BigRational, alpha: &BigRational, grid: u32) -> bool {
    let one = BigRational::one();
    if !alpha.is_positive() || alpha > &one {
        return false;
    }
    let g = |t: &BigRational| (theta - t) * (theta - t) - alpha * (eta - t) - eps * alpha * alpha;
    let vertex = theta - alpha / rat(2, 1);
    if !vertex.is_negative() && vertex <= &one - alpha && g(&vertex).is_negative() {
        return false;
    }
    // Put every quantity over the common denominator S = C·grid so that
    // t_j = j(C - al)/S and S³·g(t_j) is an integer.
    let c = [theta, eta, eps, alpha]
        .iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let grid_big = BigInt::from(grid);
    let s = &c * &grid_big;
    let scaled = |r: &BigRational| r.numer() * (&s / r.denom());
    let (th, et, ep, al) = (scaled(theta), scaled(eta), scaled(eps), scaled(alpha));
    let step = &s - &al;
    let eal2 = &ep * &al * &al;
    let mut t = BigInt::zero();
    for _ in 0..=grid {
        let tt = &t / &grid_big;
        let d = &th - &tt;
        let v = &s * &d * &d - &s * &al * (&et - &tt) - &eal2;
        if v.is_negative() {
            return false;
        }
        t += &step;
    }
    true
}

/// Combined cap `max(4/(θ(1-θ)), 3θ(1-θ)/ε) + 1` on `D_n(n^θ, n^(θ²-ε))`.
pub fn prop1_bound(theta: &BigRational, epsilon: &BigRational) -> Result<BigRational> {
    let one = BigRational::one();
    if !(theta.is_positive() && theta < &one && epsilon.is_positive() && epsilon < &(theta * theta)) {
        return Err(argument(format!(
            "need 0 < theta < 1 and 0 < epsilon < theta^2, got theta={theta}, epsilon={epsilon}"
        )));
    }
    let w = theta * (&one - theta);
    let a = rat(4, 1) / &w;
    let b = rat(3, 1) * &w / epsilon;
    Ok(a.max(b) + one)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Theorem1Rhs {
    /// `τ(n) < 3`: nothing to bound.
    Trivial,
    Value(f64),
}

/// `constant · τ(n)^(1-ξ) · V(n) · ln τ(n) / (θ(1-θ))`, for ratio diagnostics.
pub fn theorem1_rhs(n: &FactoredInteger, theta: &BigRational, eta: &BigRational, constant: f64) -> Result<Theorem1Rhs> {
    let x = xi(theta, eta)?;
    let tau = n.tau().to_f64().unwrap_or(f64::INFINITY);
    if tau < 3.0 {
        return Ok(Theorem1Rhs::Trivial);
    }
    let t = ratio_to_f64(theta);
    let v = f64::from(n.v_max());
    Ok(Theorem1Rhs::Value(
        constant * tau.powf(1.0 - x.to_f64()) * v * tau.ln() / (t * (1.0 - t)),
    ))
}

/// The `(θ, η)` grid `θ = i/(size+1)`, `η = jθ/(size+1)`, `1 <= i, j <= size`.
pub fn xi_grid(size: u32) -> Vec<(BigRational, BigRational)> {
    let d = i64::from(size) + 1;
    let mut out = Vec::new();
    for i in 1..d {
        let theta = rat(i, d);
        for j in 1..d {
            out.push((theta.clone(), &theta * rat(j, d)));
        }
    }
    out
}

/// The `(θ, η, δ)` grid `θ = i/(size+1)`, `δ` from `deltas`, and
/// `η = lo + (θ - lo)·j/size` for `j < size`, with `lo = θ² - (θ(1-θ))²δ`.
pub fn alpha_delta_grid(size: u32, deltas: &[BigRational]) -> Vec<(BigRational, BigRational, BigRational)> {
    let d = i64::from(size) + 1;
    let mut out = Vec::new();
    for i in 1..d {
        let theta = rat(i, d);
        let w = &theta * (BigRational::one() - &theta);
        for delta in deltas {
            let lo = &theta * &theta - &w * &w * delta;
            if !lo.is_positive() {
                continue;
            }
            for j in 0..i64::from(size) {
                let eta = &lo + (&theta - &lo) * rat(j, i64::from(size));
                out.push((theta.clone(), eta, delta.clone()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{factorize_u64, parse_ratio};
    use proptest::prelude::*;

    fn p(s: &str) -> BigRational {
        parse_ratio(s).unwrap()
    }

    #[test]
    fn xi_examples() {
        let x = xi(&p("0.5"), &p("0.2")).unwrap();
        assert_eq!((x.value, x.case_label), (rat(1, 1), ExponentCase::EtaLeThetaSq));
        let x = xi(&p("0.4"), &p("0.18")).unwrap();
        assert_eq!((x.value, x.case_label), (rat(8, 9), ExponentCase::SmallThetaFar));
        let x = xi(&p("0.7"), &p("0.6")).unwrap();
        assert_eq!((x.value, x.case_label), (p("0.4"), ExponentCase::LargeThetaNear));
        assert!(xi(&p("0.5"), &p("0.5")).is_err());
        assert!(xi(&p("1"), &p("0.5")).is_err());
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_closed_form(&p("0.4"), &p("0.18")).unwrap().value, rat(8, 9));
        let a = alpha_closed_form(&p("0.7"), &p("0.52")).unwrap();
        assert_eq!((a.value, a.case_label), (p("0.75"), ExponentCase::LargeThetaFar));
        assert_eq!(alpha_closed_form(&p("0.5"), &p("0.25")).unwrap().value, rat(1, 1));
        assert!(alpha_closed_form(&p("0.5"), &p("0.2")).is_err());
    }

    #[test]
    fn oracle_examples() {
        assert!((alpha_oracle(0.4, 0.18, 1000) - 8.0 / 9.0).abs() < 1e-6);
        assert!((alpha_oracle(0.5, 0.25, 1000) - 1.0).abs() < 1e-6);
        assert!((alpha_oracle(0.7, 0.6, 1000) - 0.4).abs() < 1e-6);
    }

    #[test]
    fn xi_agrees_with_alpha_above_theta_sq() {
        for (t, e) in xi_grid(30) {
            if e >= &t * &t {
                assert_eq!(xi(&t, &e).unwrap().value, alpha_closed_form(&t, &e).unwrap().value);
            }
        }
        // On the parabola itself.
        for i in 1..40 {
            let t = rat(i, 40);
            assert_eq!(alpha_closed_form(&t, &(&t * &t)).unwrap().value, rat(1, 1));
        }
    }

    #[test]
    fn xi_is_continuous_across_case_boundaries() {
        let h = rat(1, 10_000_000_000);
        let close = |a: &BigRational, b: &BigRational| ratio_to_f64(&(a - b)).abs() <= 1e-6;
        for i in 2..20 {
            let t = rat(i, 20);
            let mut edges = vec![&t * &t];
            if t <= half() {
                edges.push(&t / rat(2, 1));
            } else {
                edges.push((rat(3, 1) * &t - rat(1, 1)) / rat(2, 1));
            }
            for e in edges {
                if !(e > h && &e + &h < t) {
                    continue;
                }
                let below = xi(&t, &(&e - &h)).unwrap().value;
                let above = xi(&t, &(&e + &h)).unwrap().value;
                assert!(close(&below, &above), "theta={t} edge={e}");
            }
        }
        // Across theta = 1/2 with eta on the inner side of both rules.
        let e = rat(3, 10);
        let a = xi(&(half() - &h), &e).unwrap().value;
        let b = xi(&(half() + &h), &e).unwrap().value;
        assert!(close(&a, &b));
    }

    #[test]
    fn alpha_delta_examples() {
        let a = alpha_delta(&p("0.4"), &p("0.18"), &p("0.01")).unwrap();
        assert_eq!(a.candidate, Candidate::Alpha0);
        let v = a.value.to_f64();
        assert!((0.8789..=0.8889).contains(&v), "{v}");
        assert!(sandwich_holds(&p("0.4"), &p("0.18"), &p("0.01")).unwrap());

        let a = alpha_delta(&p("0.5"), &p("0.3"), &p("0.05")).unwrap();
        assert_eq!(a.candidate, Candidate::DeltaOver);
        let eps = p("0.0625") * p("0.05");
        assert_eq!(a.epsilon_var, eps);
        assert_eq!(a.exact, AlphaValue::Rational(p("0.8") / (rat(1, 1) + rat(4, 1) * &eps)));
    }

    #[test]
    fn alpha_delta_tends_to_alpha() {
        let tiny = rat(1, 1_000_000_000);
        for (t, e) in [("0.4", "0.18"), ("0.7", "0.52"), ("0.7", "0.6"), ("0.3", "0.2")] {
            let a = alpha_delta(&p(t), &p(e), &tiny).unwrap().value.to_f64();
            let b = alpha_closed_form(&p(t), &p(e)).unwrap().to_f64();
            assert!((a - b).abs() < 1e-6, "{t} {e}: {a} vs {b}");
        }
    }

    #[test]
    fn alpha_delta_at_lowest_eta_reaches_one() {
        // η = θ² - ε makes α₀ exactly 1, the top of the sandwich.
        let t = p("0.3");
        let d = p("0.5");
        let w = &t * (rat(1, 1) - &t);
        let eta = &t * &t - &w * &w * &d;
        let a = alpha_delta(&t, &eta, &d).unwrap();
        assert_eq!(a.candidate, Candidate::Alpha0);
        assert_eq!(a.exact.cmp_ratio(&rat(1, 1)), Ordering::Equal);
        assert!(sandwich_holds(&t, &eta, &d).unwrap());
    }

    #[test]
    fn interval_alpha_delta_matches_exact() {
        for (t, e, d) in alpha_delta_grid(6, &[p("0.05"), p("0.5"), p("1")]) {
            let exact = alpha_delta(&t, &e, &d).unwrap();
            let (iv, cand) = crate::arith::escalate(|bits| {
                alpha_delta_interval(&t, &e, &HighPrecisionReal::from_ratio(&d, bits))
            })
            .unwrap();
            assert_eq!(cand, exact.candidate);
            assert!((iv.to_f64() - exact.value.to_f64()).abs() < 1e-20);
        }
    }

    #[test]
    fn pr2_detects_violation() {
        let (t, e, d) = (p("0.4"), p("0.18"), p("0.01"));
        let a = alpha_delta(&t, &e, &d).unwrap();
        let lo = a.exact.lower_ratio(128).unwrap();
        assert!(pr2_holds(&t, &e, &a.epsilon_var, &lo, 1000));
        assert!(!pr2_holds(&t, &e, &a.epsilon_var, &(lo * rat(101, 100)), 1000));
    }

    #[test]
    fn prop1_examples() {
        assert_eq!(prop1_bound(&p("0.5"), &p("0.01")).unwrap(), rat(76, 1));
        assert_eq!(prop1_bound(&p("0.5"), &p("0.2")).unwrap(), rat(17, 1));
        assert_eq!(prop1_bound(&p("0.1"), &p("0.005")).unwrap(), rat(55, 1));
        assert!(prop1_bound(&p("0.5"), &p("0.25")).is_err());
    }

    #[test]
    fn rhs_examples() {
        let n = factorize_u64(2016).unwrap();
        let Theorem1Rhs::Value(v) = theorem1_rhs(&n, &p("0.5"), &p("0.3"), 1.0).unwrap() else {
            panic!("expected a value");
        };
        let want = 36f64.powf(0.2) * 5.0 * 36f64.ln() / 0.25;
        assert!((v - want).abs() < 1e-9 * want);
        let Theorem1Rhs::Value(v) = theorem1_rhs(&n, &p("0.5"), &p("0.2"), 2.0).unwrap() else {
            panic!("expected a value");
        };
        assert!((v - 2.0 * 5.0 * 36f64.ln() / 0.25).abs() < 1e-9);
        let k = factorize_u64(1 << 10).unwrap();
        let Theorem1Rhs::Value(v) = theorem1_rhs(&k, &p("0.5"), &p("0.3"), 1.0).unwrap() else {
            panic!("expected a value");
        };
        assert!((v - 11f64.powf(0.2) * 10.0 * 11f64.ln() / 0.25).abs() < 1e-9);
        assert_eq!(theorem1_rhs(&factorize_u64(7).unwrap(), &p("0.5"), &p("0.3"), 1.0).unwrap(), Theorem1Rhs::Trivial);
    }

    proptest! {
        #[test]
        fn sandwich_on_random_rationals(i in 1i64..100, j in 0i64..100, k in 1i64..=100) {
            let theta = rat(i, 101);
            let delta = rat(k, 100);
            let w = &theta * (rat(1, 1) - &theta);
            let lo = &theta * &theta - &w * &w * &delta;
            let eta = &lo + (&theta - &lo) * rat(j, 100);
            prop_assume!(eta.is_positive() && lo.is_positive());
            prop_assert!(sandwich_holds(&theta, &eta, &delta).unwrap());
        }

        #[test]
        fn root_comparison_is_exact(num in 1i64..1000) {
            // 2α² + 3α = 5 has root exactly 1.
            let a = AlphaValue::Root { quad: rat(2, 1), lin: rat(3, 1), constant: rat(5, 1) };
            let x = rat(num, 500);
            prop_assert_eq!(a.cmp_ratio(&x), rat(1, 1).cmp(&x));
        }
    }
}
