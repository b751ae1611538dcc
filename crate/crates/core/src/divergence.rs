//! `D_f(μ, ν) = Σ ν_i f(μ_i / ν_i)` on finite supports with `μ ≪ ν`.

use std::fmt;

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::generator::{Builtin, Generator};
use crate::measure::{align_probabilities, ProbabilityMeasure};
use crate::scalar::{CompensatedSum, Scalar};

/// Results within this distance below zero are roundoff and clamp to 0.
pub const NONNEGATIVITY_TOLERANCE: f64 = 1e-12;

/// A divergence value tagged with the generator that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceValue<T> {
    pub value: ExtendedReal<T>,
    pub generator_name: String,
}

impl<T: Scalar> fmt::Display for DivergenceValue<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.generator_name, self.value)
    }
}

/// `dμ/dν` on the atoms where `ν > 0`. Atoms null for both measures are dropped.
pub fn density_ratio<T: Scalar>(
    mu: &ProbabilityMeasure<T>,
    nu: &ProbabilityMeasure<T>,
) -> Result<Vec<(String, T)>> {
    Ok(weighted_ratios(mu, nu)?
        .into_iter()
        .map(|(id, _, ratio)| (id.to_string(), ratio))
        .collect())
}

/// `(atom, ν_i, μ_i/ν_i)` for every atom with `ν_i > 0`.
fn weighted_ratios<'a, T: Scalar>(
    mu: &'a ProbabilityMeasure<T>,
    nu: &'a ProbabilityMeasure<T>,
) -> Result<Vec<(&'a str, T, T)>> {
    let mut out = Vec::new();
    for (id, m, n) in align_probabilities(mu, nu) {
        if n > T::zero() {
            out.push((id, n, m / n));
        } else if m > T::zero() {
            return Err(Error::AbsoluteContinuityViolation {
                atom: id.to_string(),
            });
        }
    }
    Ok(out)
}

/// The raw compensated sum, before clamping. Exposed for nonnegativity checks.
pub fn d_f_unclamped<T: Scalar>(
    f: &Generator<T>,
    mu: &ProbabilityMeasure<T>,
    nu: &ProbabilityMeasure<T>,
) -> Result<ExtendedReal<T>> {
    let mut acc = CompensatedSum::new();
    for (_, weight, ratio) in weighted_ratios(mu, nu)? {
        // eval(0) yields the stored f(0⁺)
        match f.eval(ratio) {
            ExtendedReal::Finite(v) => acc.add(weight * v),
            ExtendedReal::Infinite => return Ok(ExtendedReal::Infinite),
        }
    }
    Ok(ExtendedReal::from_float(acc.total()))
}

/// `D_f(μ, ν)`. Fails with [`Error::AbsoluteContinuityViolation`] unless `μ ≪ ν`.
pub fn d_f<T: Scalar>(
    f: &Generator<T>,
    mu: &ProbabilityMeasure<T>,
    nu: &ProbabilityMeasure<T>,
) -> Result<DivergenceValue<T>> {
    let value = match d_f_unclamped(f, mu, nu)? {
        ExtendedReal::Finite(v) if v < T::zero() && v >= -T::tol(NONNEGATIVITY_TOLERANCE) => {
            ExtendedReal::zero()
        }
        v => v,
    };
    Ok(DivergenceValue {
        value,
        generator_name: f.name().to_string(),
    })
}

fn named<T: Scalar>(
    b: Builtin,
    mu: &ProbabilityMeasure<T>,
    nu: &ProbabilityMeasure<T>,
) -> Result<DivergenceValue<T>> {
    d_f(&b.generator(), mu, nu)
}

/// Kullback–Leibler divergence in nats.
pub fn kl<T: Scalar>(
    mu: &ProbabilityMeasure<T>,
    nu: &ProbabilityMeasure<T>,
) -> Result<DivergenceValue<T>> {
    named(Builtin::KullbackLeibler, mu, nu)
}

/// Shannon divergence, `SH(μ, ν) = KL(ν, μ)`.
pub fn sh<T: Scalar>(
    mu: &ProbabilityMeasure<T>,
    nu: &ProbabilityMeasure<T>,
) -> Result<DivergenceValue<T>> {
    named(Builtin::Shannon, mu, nu)
}

/// Squared Hellinger divergence with generator `(√x − 1)²` (no factor 1/2).
pub fn hellinger<T: Scalar>(
    mu: &ProbabilityMeasure<T>,
    nu: &ProbabilityMeasure<T>,
) -> Result<DivergenceValue<T>> {
    named(Builtin::Hellinger, mu, nu)
}

/// Pearson χ² divergence.
pub fn pearson<T: Scalar>(
    mu: &ProbabilityMeasure<T>,
    nu: &ProbabilityMeasure<T>,
) -> Result<DivergenceValue<T>> {
    named(Builtin::Pearson, mu, nu)
}

/// The total variation as an f-divergence.
pub fn tv<T: Scalar>(
    mu: &ProbabilityMeasure<T>,
    nu: &ProbabilityMeasure<T>,
) -> Result<DivergenceValue<T>> {
    named(Builtin::TotalVariation, mu, nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::tv_distance;

    fn prob(w: &[f64]) -> ProbabilityMeasure<f64> {
        ProbabilityMeasure::from_weights(w).unwrap()
    }

    #[test]
    fn density_ratio_examples() {
        let r = density_ratio(&prob(&[0.5, 0.5]), &prob(&[0.25, 0.75])).unwrap();
        assert_eq!(r[0], ("a1".to_string(), 2.0));
        assert!((r[1].1 - 2.0 / 3.0).abs() < 1e-15);
        let mu = prob(&[0.3, 0.7]);
        assert!(density_ratio(&mu, &mu)
            .unwrap()
            .iter()
            .all(|(_, x)| *x == 1.0));

        let mu = ProbabilityMeasure::new([("a1", 0.3), ("a2", 0.0), ("a3", 0.7)]).unwrap();
        let nu = ProbabilityMeasure::new([("a1", 0.3), ("a2", 0.0), ("a3", 0.7)]).unwrap();
        let r = density_ratio(&mu, &nu).unwrap();
        assert_eq!(r, vec![("a1".to_string(), 1.0), ("a3".to_string(), 1.0)]);
    }

    #[test]
    fn kl_example() {
        // 0.5 ln 2 + 0.5 ln(2/3) = 0.5 ln(4/3)
        let d = kl(&prob(&[0.5, 0.5]), &prob(&[0.25, 0.75])).unwrap();
        assert!((d.value.to_float() - 0.143_841_036_225_890_1).abs() < 1e-15);
        assert_eq!(d.generator_name, "KL");
    }

    #[test]
    fn pearson_example() {
        let d = pearson(&prob(&[0.5, 0.5]), &prob(&[0.25, 0.75])).unwrap();
        assert!((d.value.to_float() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn tv_generator_matches_metric() {
        let (mu, nu) = (prob(&[0.5, 0.5]), prob(&[0.25, 0.75]));
        assert_eq!(tv(&mu, &nu).unwrap().value, 0.5);
        assert_eq!(tv_distance(&mu, &nu), 0.5);
    }

    #[test]
    fn identical_measures_give_zero() {
        let mu = prob(&[0.1, 0.2, 0.3, 0.4]);
        for b in Builtin::ALL {
            assert_eq!(d_f(&b.generator(), &mu, &mu).unwrap().value, 0.0, "{b}");
        }
        assert_eq!(hellinger(&mu, &mu).unwrap().value, 0.0);
    }

    #[test]
    fn zero_mass_atoms_use_value_at_zero() {
        let mu = prob(&[0.0, 1.0]);
        let nu = prob(&[0.5, 0.5]);
        assert_eq!(sh(&mu, &nu).unwrap().value, ExtendedReal::Infinite);
        // 0.5·f(0) + 0.5·f(2) with f = x log x and f(0) = 0
        assert!((kl(&mu, &nu).unwrap().value.to_float() - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(pearson(&mu, &nu).unwrap().value, 1.0);
    }

    #[test]
    fn requires_absolute_continuity() {
        let err = kl(&prob(&[0.5, 0.5]), &prob(&[1.0, 0.0])).unwrap_err();
        assert_eq!(
            err,
            Error::AbsoluteContinuityViolation { atom: "a2".into() }
        );
    }
}
