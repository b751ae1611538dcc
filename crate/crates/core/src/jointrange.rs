//! Empirical checks of `φ(TV/2) ≤ D_f`: seeded random pairs, a Bernoulli
//! grid scan, and the gap between the certified TV and the binary frontier.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::bounds::{invert, lower_bound};
use crate::divergence::d_f;
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::generator::Generator;
use crate::measure::{tv_distance, ProbabilityMeasure};
use crate::scalar::Scalar;

/// Per-atom floor applied to `ν` before renormalizing.
pub const NU_FLOOR: f64 = 1e-9;
/// A verification run passes when no trial exceeds this violation.
pub const VIOLATION_TOLERANCE: f64 = 1e-9;
/// Bracket width for the frontier search along `q`.
const FRONTIER_TOLERANCE: f64 = 1e-12;
const FRONTIER_MAX_STEPS: usize = 200;

fn normalized_exponentials(rng: &mut ChaCha20Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// The pair drawn from stream `stream` of `seed`; streams never overlap.
pub fn pair_on_stream<T: Scalar>(
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<(ProbabilityMeasure<T>, ProbabilityMeasure<T>)> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "support size must be at least 2, got {n}"
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mu = normalized_exponentials(&mut rng, n);
    let nu = normalized_exponentials(&mut rng, n);
    let nu_floored: Vec<f64> = nu.into_iter().map(|w| w.max(NU_FLOOR)).collect();
    let cast = |w: Vec<f64>| w.into_iter().map(T::lit).collect::<Vec<T>>();
    let nu_total: f64 = nu_floored.iter().sum();
    let nu = cast(nu_floored.into_iter().map(|w| w / nu_total).collect());
    Ok((
        ProbabilityMeasure::normalize(ids(n).zip(cast(mu)))?,
        ProbabilityMeasure::normalize(ids(n).zip(nu))?,
    ))
}

fn ids(n: usize) -> impl Iterator<Item = String> {
    (1..=n).map(|i| format!("a{i}"))
}

/// Two measures on `n` atoms; `ν` is bounded below by about `1e-9`, so `μ ≪ ν`.
/// Deterministic per `(n, seed)`.
pub fn random_pair<T: Scalar>(
    n: usize,
    seed: u64,
) -> Result<(ProbabilityMeasure<T>, ProbabilityMeasure<T>)> {
    pair_on_stream(n, seed, 0)
}

/// One point of the Bernoulli scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord<T> {
    pub p: T,
    pub q: T,
    pub tv: T,
    pub divergence: ExtendedReal<T>,
    pub lower_bound: ExtendedReal<T>,
    /// `divergence − lower_bound`; `+inf` when the divergence is infinite.
    pub slack: T,
}

fn bernoulli<T: Scalar>(p: T) -> Result<ProbabilityMeasure<T>> {
    ProbabilityMeasure::from_weights(&[p, T::one() - p])
}

fn slack<T: Scalar>(divergence: ExtendedReal<T>, lower: ExtendedReal<T>) -> T {
    match (divergence, lower) {
        (ExtendedReal::Infinite, _) => T::infinity(),
        (ExtendedReal::Finite(_), ExtendedReal::Infinite) => T::neg_infinity(),
        (ExtendedReal::Finite(d), ExtendedReal::Finite(l)) => d - l,
    }
}

/// `resolution` interior points `i / (resolution + 1)`.
pub fn open_grid<T: Scalar>(resolution: usize) -> Vec<T> {
    let denom = T::from_usize(resolution + 1).expect("resolution fits scalar");
    (1..=resolution)
        .map(|i| T::from_usize(i).unwrap() / denom)
        .collect()
}

/// Evaluates both sides of the bound for `μ = (p, 1−p)`, `ν = (q, 1−q)` over
/// `p, q` on [`open_grid`]. Rows are ordered by `p`, then `q`.
pub fn scan_binary<T: Scalar>(f: &Generator<T>, resolution: usize) -> Result<Vec<ScanRecord<T>>> {
    if resolution < 2 {
        return Err(Error::Domain(format!(
            "scan resolution must be at least 2, got {resolution}"
        )));
    }
    let grid = open_grid::<T>(resolution);
    let rows: Vec<Result<Vec<ScanRecord<T>>>> = grid
        .par_iter()
        .map(|&p| {
            let mu = bernoulli(p)?;
            grid.iter()
                .map(|&q| {
                    let nu = bernoulli(q)?;
                    let tv = T::lit(2.0) * (p - q).abs();
                    let divergence = d_f(f, &mu, &nu)?.value;
                    let lower = lower_bound(f, tv.min(T::lit(2.0)))?;
                    Ok(ScanRecord {
                        p,
                        q,
                        tv,
                        divergence,
                        lower_bound: lower,
                        slack: slack(divergence, lower),
                    })
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(resolution * resolution);
    for row in rows {
        out.extend(row?);
    }
    Ok(out)
}

/// Outcome of [`verify_bound`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport<T> {
    pub generator_name: String,
    pub trials: usize,
    pub max_support: usize,
    pub seed: u64,
    /// `max(lower_bound − divergence)` over trials; infinite divergences count as 0.
    pub max_violation: T,
    pub worst_trial: usize,
    pub worst_pair: (ProbabilityMeasure<T>, ProbabilityMeasure<T>),
}

impl<T: Scalar> VerificationReport<T> {
    pub fn passed(&self) -> bool {
        self.max_violation <= T::tol(VIOLATION_TOLERANCE)
    }
}

fn support_for_trial(trial: usize, max_support: usize) -> usize {
    2 + trial % (max_support - 1)
}

fn trial_violation<T: Scalar>(f: &Generator<T>, n: usize, seed: u64, trial: usize) -> Result<T> {
    let (mu, nu) = pair_on_stream::<T>(n, seed, trial as u64)?;
    let divergence = d_f(f, &mu, &nu)?.value;
    let lower = lower_bound(f, tv_distance(&mu, &nu).min(T::lit(2.0)))?;
    Ok(match (divergence, lower) {
        (ExtendedReal::Infinite, _) => T::zero(),
        (ExtendedReal::Finite(_), ExtendedReal::Infinite) => T::infinity(),
        (ExtendedReal::Finite(d), ExtendedReal::Finite(l)) => l - d,
    })
}

/// Checks the bound on `trials` seeded pairs whose support sizes cycle through
/// `2..=max_support`. Trial `i` uses stream `i` of `seed`, so the report does
/// not depend on how trials are scheduled.
pub fn verify_bound<T: Scalar>(
    f: &Generator<T>,
    trials: usize,
    max_support: usize,
    seed: u64,
) -> Result<VerificationReport<T>> {
    if trials == 0 {
        return Err(Error::Domain(
            "verification needs at least one trial".into(),
        ));
    }
    if max_support < 2 {
        return Err(Error::Domain(format!(
            "max support must be at least 2, got {max_support}"
        )));
    }
    let violations = (0..trials)
        .into_par_iter()
        .map(|i| trial_violation(f, support_for_trial(i, max_support), seed, i).map(|v| (v, i)))
        .collect::<Result<Vec<_>>>()?;
    // first index wins ties
    let (max_violation, worst_trial) =
        violations
            .into_iter()
            .fold((T::neg_infinity(), 0), |best, cur| {
                if cur.0 > best.0 {
                    cur
                } else {
                    best
                }
            });
    let worst_pair = pair_on_stream(
        support_for_trial(worst_trial, max_support),
        seed,
        worst_trial as u64,
    )?;
    Ok(VerificationReport {
        generator_name: f.name().to_string(),
        trials,
        max_support,
        seed,
        max_violation,
        worst_trial,
        worst_pair,
    })
}

/// Certified TV against the largest TV reached by a Bernoulli pair within the
/// divergence budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TightnessGap<T> {
    pub certified_tv: T,
    pub achieved_tv: T,
    pub gap: T,
}

/// The binary divergence used by the frontier search. With a separation
/// coefficient `a` the integrand is `f(x) − a(x − 1)`, which has the same
/// integral but no cancellation near `x = 1`.
fn frontier_generator<T: Scalar>(f: &Generator<T>) -> Result<Generator<T>> {
    let Some(a) = f.separation_coefficient() else {
        return Ok(f.clone());
    };
    let inner = f.clone();
    let at_zero = match f.value_at_zero() {
        ExtendedReal::Finite(v) => ExtendedReal::Finite(v + a),
        ExtendedReal::Infinite => ExtendedReal::Infinite,
    };
    Generator::custom(f.name(), move |x| inner.shifted(a, x).to_float(), at_zero)
}

/// Farthest `q` from `anchor` toward `target` with divergence at most `budget`,
/// assuming the divergence is convex in `q` and feasible at `anchor`.
fn frontier_edge<T: Scalar>(
    divergence: &dyn Fn(T) -> Result<ExtendedReal<T>>,
    budget: ExtendedReal<T>,
    anchor: T,
    target: T,
) -> Result<T> {
    if divergence(target)? <= budget {
        return Ok(target);
    }
    let (mut feasible, mut infeasible) = (anchor, target);
    let tol = T::tol(FRONTIER_TOLERANCE);
    for _ in 0..FRONTIER_MAX_STEPS {
        if (infeasible - feasible).abs() <= tol {
            break;
        }
        let mid = feasible + (infeasible - feasible) / T::lit(2.0);
        if mid == feasible || mid == infeasible {
            break;
        }
        if divergence(mid)? <= budget {
            feasible = mid;
        } else {
            infeasible = mid;
        }
    }
    Ok(feasible)
}

/// Compares [`invert`] at `d_target` with the binary frontier: `p` runs over
/// `resolution` evenly spaced points of `[0, 1]` and, for each, the sub-level
/// set `{q : D_f((p, 1−p), (q, 1−q)) ≤ d_target}` is traced to its ends by
/// bisection (it is an interval, by convexity of `D_f` in `ν`). `q` stays in
/// `[1e-12, 1 − 1e-12]` so that `μ ≪ ν`.
pub fn tightness_gap<T: Scalar>(
    f: &Generator<T>,
    d_target: T,
    resolution: usize,
) -> Result<TightnessGap<T>> {
    if !d_target.is_finite() || d_target < T::zero() {
        return Err(Error::Domain(format!(
            "target divergence must be finite and nonnegative, got {d_target}"
        )));
    }
    if resolution < 2 {
        return Err(Error::Domain(format!(
            "resolution must be at least 2, got {resolution}"
        )));
    }
    let budget = ExtendedReal::Finite(d_target);
    let certified_tv = invert(f, budget)?.tv_upper_bound;
    let g = frontier_generator(f)?;
    let edge = T::tol(FRONTIER_TOLERANCE);
    let (q_min, q_max) = (edge, T::one() - edge);
    let last = T::from_usize(resolution - 1).unwrap();

    let per_p = (0..resolution)
        .into_par_iter()
        .map(|i| -> Result<T> {
            let p = if i + 1 == resolution {
                T::one()
            } else {
                T::from_usize(i).unwrap() / last
            };
            let mu = bernoulli(p)?;
            let divergence =
                |q: T| -> Result<ExtendedReal<T>> { Ok(d_f(&g, &mu, &bernoulli(q)?)?.value) };
            let anchor = p.max(q_min).min(q_max);
            if divergence(anchor)? > budget {
                return Ok(T::neg_infinity());
            }
            let up = frontier_edge(&divergence, budget, anchor, q_max)?;
            let down = frontier_edge(&divergence, budget, anchor, q_min)?;
            Ok(T::lit(2.0) * (up - p).abs().max((p - down).abs()))
        })
        .collect::<Result<Vec<T>>>()?;
    let achieved_tv = per_p.into_iter().fold(T::zero(), T::max);
    Ok(TightnessGap {
        certified_tv,
        achieved_tv,
        gap: certified_tv - achieved_tv,
    })
}
