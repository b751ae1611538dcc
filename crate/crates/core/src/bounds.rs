//! Lower bounds on `D_f` in terms of total variation and their inversion.
//!
//! For any pair `μ ≪ ν` and any convex `f` with `f(1) = 0`,
//!
//! ```text
//! φ(TV/2) ≤ D_f(μ, ν),   φ(t) = f(1 + t) + f(1 − t).
//! ```
//!
//! `φ` is convex with `φ(0) = 0` and `φ ≥ 0`, hence nondecreasing on `[0, 1]`,
//! and strictly increasing when `f` admits a separation coefficient. Inverting
//! it at an observed divergence gives an upper bound on the total variation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::generator::{Builtin, Generator};
use crate::scalar::Scalar;

/// Target width of the bisection bracket, in total-variation units.
pub const INVERSION_TOLERANCE: f64 = 1e-10;
/// Iteration cap for the bisection.
pub const MAX_BISECTION_STEPS: usize = 200;
/// Grid used to screen custom generators before inverting.
pub const MONOTONE_SCREEN_GRID: usize = 1001;
/// Slack for "nondecreasing" in [`check_monotone`].
pub const MONOTONE_TOLERANCE: f64 = 1e-12;
/// Divergence values this far below zero are accepted as roundoff.
pub const NEGATIVE_DIVERGENCE_TOLERANCE: f64 = 1e-12;

/// `φ(t) = f(1 + t) + f(1 − t)` on `t ∈ [0, 1]`.
#[derive(Clone)]
pub struct BoundFunction<T> {
    generator: Generator<T>,
}

impl<T: Scalar> std::fmt::Debug for BoundFunction<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundFunction")
            .field("generator", &self.generator)
            .finish()
    }
}

impl<T: Scalar> BoundFunction<T> {
    pub fn new(generator: Generator<T>) -> Self {
        Self { generator }
    }

    pub fn generator(&self) -> &Generator<T> {
        &self.generator
    }

    pub fn eval(&self, t: T) -> Result<ExtendedReal<T>> {
        if !(t >= T::zero() && t <= T::one()) {
            return Err(Error::Domain(format!("phi needs t in [0, 1], got {t}")));
        }
        Ok(self.eval_unchecked(t))
    }

    fn eval_unchecked(&self, t: T) -> ExtendedReal<T> {
        self.generator.eval(T::one() + t) + self.generator.eval(T::one() - t)
    }
}

/// `φ_f(t)`; at `t = 1` the second term is `f(0⁺)`.
pub fn phi<T: Scalar>(f: &Generator<T>, t: T) -> Result<ExtendedReal<T>> {
    BoundFunction::new(f.clone()).eval(t)
}

/// `φ_f(tv / 2)`, a lower bound on `D_f` over all pairs at total variation `tv`.
pub fn lower_bound<T: Scalar>(f: &Generator<T>, tv: T) -> Result<ExtendedReal<T>> {
    if !(tv >= T::zero() && tv <= T::lit(2.0)) {
        return Err(Error::Domain(format!(
            "total variation must lie in [0, 2], got {tv}"
        )));
    }
    phi(f, tv / T::lit(2.0))
}

/// How a [`TvCertificate`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    NumericInversion,
    BretagnolleHuber,
    HellingerClosedForm,
}

/// An upper bound on `TV(μ, ν)` implied by `D_f(μ, ν) ≤ divergence_value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TvCertificate<T> {
    #[serde(rename = "divergence")]
    pub divergence_name: String,
    #[serde(rename = "value")]
    pub divergence_value: ExtendedReal<T>,
    pub tv_upper_bound: T,
    pub method: Method,
}

fn check_divergence<T: Scalar>(d: ExtendedReal<T>) -> Result<ExtendedReal<T>> {
    match d {
        ExtendedReal::Finite(v) if v < -T::tol(NEGATIVE_DIVERGENCE_TOLERANCE) => Err(
            Error::Domain(format!("divergence value must be nonnegative, got {v}")),
        ),
        ExtendedReal::Finite(v) if v < T::zero() => Ok(ExtendedReal::zero()),
        d => Ok(d),
    }
}

/// `sup { tv ∈ [0, 2] : φ_f(tv/2) ≤ d }`, by bisection on `t = tv/2`.
///
/// The returned bound is the upper end of the final bracket, so it never
/// undercuts the true supremum; the bracket is at most `1e-10` wide in TV units.
/// Where `φ` is flat the rightmost crossing is taken. Generators not known to
/// be convex are screened with [`check_monotone`] first.
pub fn invert<T: Scalar>(f: &Generator<T>, d: ExtendedReal<T>) -> Result<TvCertificate<T>> {
    let d = check_divergence(d)?;
    if !f.is_known_convex() && !check_monotone(f, MONOTONE_SCREEN_GRID) {
        return Err(Error::NonMonotoneGenerator(f.name().to_string()));
    }
    let phi = BoundFunction::new(f.clone());
    let certificate = |t: T| TvCertificate {
        divergence_name: f.name().to_string(),
        divergence_value: d,
        tv_upper_bound: (T::lit(2.0) * t).min(T::lit(2.0)),
        method: Method::NumericInversion,
    };

    if phi.eval_unchecked(T::one()) <= d {
        return Ok(certificate(T::one()));
    }
    // φ > 0 away from 0 under a separation coefficient
    if d == ExtendedReal::zero() && f.separation_coefficient().is_some() {
        return Ok(certificate(T::zero()));
    }

    // invariant: φ(lo) ≤ d < φ(hi)
    let (mut lo, mut hi) = (T::zero(), T::one());
    let half_width = T::tol(INVERSION_TOLERANCE) / T::lit(2.0);
    for _ in 0..MAX_BISECTION_STEPS {
        if hi - lo <= half_width {
            break;
        }
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi.eval_unchecked(mid) <= d {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(certificate(hi))
}

/// Closed-form inversion for the Shannon divergence:
/// `(2√(1 − e^{−sh}), 2√sh)`, both capped at 2.
pub fn bretagnolle_huber<T: Scalar>(sh: ExtendedReal<T>) -> Result<(T, T)> {
    let two = T::lit(2.0);
    match sh {
        ExtendedReal::Infinite => Ok((two, two)),
        ExtendedReal::Finite(s) if s < T::zero() || s.is_nan() => Err(Error::Domain(format!(
            "SH divergence must be nonnegative, got {s}"
        ))),
        ExtendedReal::Finite(s) => {
            // 1 − e^{−s} without cancellation near 0
            let tight = two * (-(-s).exp_m1()).sqrt();
            let loose = two * s.sqrt();
            Ok((tight.min(two), loose.min(two)))
        }
    }
}

/// TV bound from a squared-Hellinger value: `2 − 2(1 − √he)²` below 1, else 2.
pub fn hellinger_bound<T: Scalar>(he: ExtendedReal<T>) -> Result<T> {
    let two = T::lit(2.0);
    match he {
        ExtendedReal::Infinite => Ok(two),
        ExtendedReal::Finite(h) if h < T::zero() || h.is_nan() => Err(Error::Domain(format!(
            "Hellinger divergence must be nonnegative, got {h}"
        ))),
        ExtendedReal::Finite(h) if h < T::one() => Ok(two - two * (T::one() - h.sqrt()).powi(2)),
        ExtendedReal::Finite(_) => Ok(two),
    }
}

/// [`bretagnolle_huber`]'s tight bound packaged as a certificate.
pub fn certify_bretagnolle_huber<T: Scalar>(sh: ExtendedReal<T>) -> Result<TvCertificate<T>> {
    let sh = check_divergence(sh)?;
    Ok(TvCertificate {
        divergence_name: Builtin::Shannon.name().to_string(),
        divergence_value: sh,
        tv_upper_bound: bretagnolle_huber(sh)?.0,
        method: Method::BretagnolleHuber,
    })
}

/// [`hellinger_bound`] packaged as a certificate.
pub fn certify_hellinger<T: Scalar>(he: ExtendedReal<T>) -> Result<TvCertificate<T>> {
    let he = check_divergence(he)?;
    Ok(TvCertificate {
        divergence_name: Builtin::Hellinger.name().to_string(),
        divergence_value: he,
        tv_upper_bound: hellinger_bound(he)?,
        method: Method::HellingerClosedForm,
    })
}

/// Shape of `φ` on a uniform grid of `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Strict,
    NonDecreasing,
    Violated,
}

/// Classifies `φ_f` sampled at `grid_size` evenly spaced points of `[0, 1]`.
pub fn monotonicity<T: Scalar>(f: &Generator<T>, grid_size: usize) -> Monotonicity {
    let phi = BoundFunction::new(f.clone());
    let n = grid_size.max(2) - 1;
    let n_t = T::from_usize(n).expect("grid size fits scalar");
    let tol = T::tol(MONOTONE_TOLERANCE);
    let values: Vec<ExtendedReal<T>> = (0..=n)
        .map(|i| {
            phi.eval_unchecked(if i == n {
                T::one()
            } else {
                T::from_usize(i).unwrap() / n_t
            })
        })
        .collect();
    let mut strict = true;
    for w in values.windows(2) {
        match (w[0], w[1]) {
            (ExtendedReal::Infinite, ExtendedReal::Finite(_)) => return Monotonicity::Violated,
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => {
                if b < a - tol {
                    return Monotonicity::Violated;
                }
                strict &= b > a;
            }
            (ExtendedReal::Infinite, ExtendedReal::Infinite) => strict = false,
            (ExtendedReal::Finite(_), ExtendedReal::Infinite) => {}
        }
    }
    if strict {
        Monotonicity::Strict
    } else {
        Monotonicity::NonDecreasing
    }
}

/// Whether `φ_f` is nondecreasing on the grid (within `1e-12`); generators with
/// a separation coefficient must be strictly increasing.
pub fn check_monotone<T: Scalar>(f: &Generator<T>, grid_size: usize) -> bool {
    match monotonicity(f, grid_size) {
        Monotonicity::Strict => true,
        Monotonicity::NonDecreasing => f.separation_coefficient().is_none(),
        Monotonicity::Violated => false,
    }
}
