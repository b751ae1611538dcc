//! Signed and probability measures on finite atom sets, the Hahn–Jordan
//! decomposition, and the total variation in its three forms.
//!
//! The measurable sets are all subsets of the support, so a measure is fully
//! described by its atom weights. Binary operations align two measures on the
//! union of their atom ids; an atom missing from one side has weight zero there.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};

/// Tolerance on `|Σ w − 1|` accepted by [`ProbabilityMeasure::new`].
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-9;

/// A finite-valued signed measure on a finite set of named atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedMeasure<T> {
    atoms: Vec<(String, T)>,
}

impl<T: Scalar> SignedMeasure<T> {
    /// Builds a measure, rejecting duplicate ids and non-finite weights.
    pub fn new<S: Into<String>>(atoms: impl IntoIterator<Item = (S, T)>) -> Result<Self> {
        let atoms: Vec<(String, T)> = atoms.into_iter().map(|(id, w)| (id.into(), w)).collect();
        let mut seen = HashSet::with_capacity(atoms.len());
        for (id, w) in &atoms {
            if !seen.insert(id.as_str()) {
                return Err(Error::InvalidMeasure(format!("duplicate atom id {id:?}")));
            }
            if !w.is_finite() {
                return Err(Error::InvalidMeasure(format!(
                    "atom {id:?} has non-finite weight {w}"
                )));
            }
        }
        Ok(Self { atoms })
    }

    /// Weights on atoms named `a1, a2, ...`.
    pub fn from_weights(weights: &[T]) -> Result<Self> {
        Self::new(default_ids(weights.len()).zip(weights.iter().copied()))
    }

    pub fn atoms(&self) -> &[(String, T)] {
        &self.atoms
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> + '_ {
        self.atoms.iter().map(|(id, _)| id.as_str())
    }

    pub fn weights(&self) -> impl Iterator<Item = T> + '_ {
        self.atoms.iter().map(|&(_, w)| w)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn weight(&self, id: &str) -> Option<T> {
        self.atoms.iter().find(|(a, _)| a == id).map(|&(_, w)| w)
    }

    /// `ν(Ω)`.
    pub fn total_mass(&self) -> T {
        compensated_sum(self.weights())
    }

    /// `ν(B)` for a set of atom ids; ids outside the support contribute zero.
    pub fn mass_of<'a>(&self, ids: impl IntoIterator<Item = &'a str>) -> T {
        let wanted: HashSet<&str> = ids.into_iter().collect();
        compensated_sum(
            self.atoms
                .iter()
                .filter(|(id, _)| wanted.contains(id.as_str()))
                .map(|&(_, w)| w),
        )
    }

    /// Atomwise difference `self − other` on the union of both supports.
    pub fn difference(&self, other: &Self) -> Self {
        let atoms = align(&self.atoms, &other.atoms)
            .into_iter()
            .map(|(id, a, b)| (id.to_string(), a - b))
            .collect();
        Self { atoms }
    }
}

/// A nonnegative measure of total mass one (within [`PROBABILITY_SUM_TOLERANCE`]).
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMeasure<T> {
    inner: SignedMeasure<T>,
}

impl<T: Scalar> ProbabilityMeasure<T> {
    /// Validates weights as given; nothing is renormalized.
    pub fn new<S: Into<String>>(atoms: impl IntoIterator<Item = (S, T)>) -> Result<Self> {
        let inner = SignedMeasure::new(atoms)?;
        if inner.is_empty() {
            return Err(Error::InvalidMeasure(
                "probability measure needs at least one atom".into(),
            ));
        }
        if let Some((id, w)) = inner.atoms.iter().find(|(_, w)| *w < T::zero()) {
            return Err(Error::InvalidMeasure(format!(
                "atom {id:?} has negative weight {w}"
            )));
        }
        let total = inner.total_mass();
        if (total - T::one()).abs() > T::tol(PROBABILITY_SUM_TOLERANCE) {
            return Err(Error::InvalidMeasure(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Self { inner })
    }

    /// Scales nonnegative weights to unit mass.
    pub fn normalize<S: Into<String>>(atoms: impl IntoIterator<Item = (S, T)>) -> Result<Self> {
        let raw = SignedMeasure::new(atoms)?;
        if let Some((id, w)) = raw.atoms.iter().find(|(_, w)| *w < T::zero()) {
            return Err(Error::InvalidMeasure(format!(
                "atom {id:?} has negative weight {w}"
            )));
        }
        let total = raw.total_mass();
        if !total.is_finite() || total <= T::zero() {
            return Err(Error::InvalidMeasure(format!(
                "cannot normalize total mass {total}"
            )));
        }
        Self::new(raw.atoms.into_iter().map(|(id, w)| (id, w / total)))
    }

    /// Weights on atoms named `a1, a2, ...`.
    pub fn from_weights(weights: &[T]) -> Result<Self> {
        Self::new(default_ids(weights.len()).zip(weights.iter().copied()))
    }

    pub fn as_signed(&self) -> &SignedMeasure<T> {
        &self.inner
    }

    pub fn into_signed(self) -> SignedMeasure<T> {
        self.inner
    }

    pub fn atoms(&self) -> &[(String, T)] {
        self.inner.atoms()
    }

    pub fn weights(&self) -> impl Iterator<Item = T> + '_ {
        self.inner.weights()
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    pub fn weight(&self, id: &str) -> Option<T> {
        self.inner.weight(id)
    }
}

/// Pairs the weights of two atom lists on the union of their ids, in order of
/// first appearance (left list first). Missing atoms get weight zero.
pub fn align<'a, T: Scalar>(
    left: &'a [(String, T)],
    right: &'a [(String, T)],
) -> Vec<(&'a str, T, T)> {
    let right_index: HashMap<&str, T> = right.iter().map(|(id, w)| (id.as_str(), *w)).collect();
    let mut out: Vec<(&str, T, T)> = left
        .iter()
        .map(|(id, w)| {
            (
                id.as_str(),
                *w,
                right_index
                    .get(id.as_str())
                    .copied()
                    .unwrap_or_else(T::zero),
            )
        })
        .collect();
    let left_ids: HashSet<&str> = left.iter().map(|(id, _)| id.as_str()).collect();
    out.extend(
        right
            .iter()
            .filter(|(id, _)| !left_ids.contains(id.as_str()))
            .map(|(id, w)| (id.as_str(), T::zero(), *w)),
    );
    out
}

/// Aligned weights of two probability measures.
pub fn align_probabilities<'a, T: Scalar>(
    mu: &'a ProbabilityMeasure<T>,
    nu: &'a ProbabilityMeasure<T>,
) -> Vec<(&'a str, T, T)> {
    align(mu.atoms(), nu.atoms())
}

fn default_ids(n: usize) -> impl Iterator<Item = String> {
    (1..=n).map(|i| format!("a{i}"))
}

/// A Hahn–Jordan split: `Ω = P ∪ N` with `ν⁺ = ν(· ∩ P)` and `ν⁻ = −ν(· ∩ N)`.
///
/// `upper` and `lower` are listed on the full support of `ν` (zero weight off
/// `P` and off `N` respectively), so `ν = upper − lower` atom by atom.
#[derive(Debug, Clone, PartialEq)]
pub struct HahnDecomposition<T> {
    pub positive: Vec<String>,
    pub negative: Vec<String>,
    pub upper: SignedMeasure<T>,
    pub lower: SignedMeasure<T>,
}

impl<T: Scalar> HahnDecomposition<T> {
    /// `ν⁺(Ω)`.
    pub fn upper_mass(&self) -> T {
        self.upper.total_mass()
    }

    /// `ν⁻(Ω)`.
    pub fn lower_mass(&self) -> T {
        self.lower.total_mass()
    }

    /// The variation measure `|ν| = ν⁺ + ν⁻`.
    pub fn variation(&self) -> SignedMeasure<T> {
        let atoms = self
            .upper
            .atoms()
            .iter()
            .zip(self.lower.atoms())
            .map(|((id, u), (_, l))| (id.clone(), *u + *l))
            .collect();
        SignedMeasure { atoms }
    }
}

/// Splits the support by sign. Atoms of weight exactly zero go to `P`.
pub fn hahn_jordan<T: Scalar>(nu: &SignedMeasure<T>) -> HahnDecomposition<T> {
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    let mut upper = Vec::with_capacity(nu.len());
    let mut lower = Vec::with_capacity(nu.len());
    for (id, w) in nu.atoms() {
        if *w >= T::zero() {
            positive.push(id.clone());
            upper.push((id.clone(), *w + T::zero()));
            lower.push((id.clone(), T::zero()));
        } else {
            negative.push(id.clone());
            upper.push((id.clone(), T::zero()));
            lower.push((id.clone(), -*w));
        }
    }
    HahnDecomposition {
        positive,
        negative,
        upper: SignedMeasure { atoms: upper },
        lower: SignedMeasure { atoms: lower },
    }
}

/// `‖ν‖ = |ν|(Ω)`, the sum of absolute weights.
pub fn total_variation_norm<T: Scalar>(nu: &SignedMeasure<T>) -> T {
    compensated_sum(nu.weights().map(|w| w.abs()))
}

/// `‖μ − ν‖ = Σ |μ_i − ν_i|` over the union of supports; lies in `[0, 2]`.
pub fn tv_distance<T: Scalar>(mu: &ProbabilityMeasure<T>, nu: &ProbabilityMeasure<T>) -> T {
    compensated_sum(
        align_probabilities(mu, nu)
            .into_iter()
            .map(|(_, a, b)| (a - b).abs()),
    )
}

/// `∫ |dμ/dν − 1| dν`, defined when `μ ≪ ν`.
pub fn tv_via_density<T: Scalar>(
    mu: &ProbabilityMeasure<T>,
    nu: &ProbabilityMeasure<T>,
) -> Result<T> {
    let mut terms = Vec::new();
    for (id, m, n) in align_probabilities(mu, nu) {
        if n > T::zero() {
            terms.push(n * (m / n - T::one()).abs());
        } else if m > T::zero() {
            return Err(Error::AbsoluteContinuityViolation {
                atom: id.to_string(),
            });
        }
    }
    Ok(compensated_sum(terms))
}

/// Exhaustive subset enumeration over small supports, used to cross-check the
/// closed forms above.
pub mod oracle {
    use super::*;

    /// Largest support the enumeration accepts.
    pub const MAX_ATOMS: usize = 20;

    fn check_size(n: usize) -> Result<()> {
        if n > MAX_ATOMS {
            Err(Error::OracleTooLarge {
                atoms: n,
                max: MAX_ATOMS,
            })
        } else {
            Ok(())
        }
    }

    /// `ν(B)` for the subset encoded by bit mask `mask` (bit `i` ↔ atom `i`),
    /// summed in atom order.
    pub fn mask_mass<T: Scalar>(nu: &SignedMeasure<T>, mask: u32) -> T {
        let mut s = T::zero();
        for (i, w) in nu.weights().enumerate() {
            if mask >> i & 1 == 1 {
                s = s + w;
            }
        }
        s
    }

    /// `ν(B)` for every one of the `2^n` subsets, indexed by mask.
    pub fn subset_masses<T: Scalar>(nu: &SignedMeasure<T>) -> Result<Vec<T>> {
        check_size(nu.len())?;
        Ok((0..1u32 << nu.len())
            .map(|mask| mask_mass(nu, mask))
            .collect())
    }

    /// `(sup, inf)` of `ν(B)` over all subsets `B` of the set encoded by `mask`.
    pub fn subset_extrema<T: Scalar>(masses: &[T], mask: u32) -> (T, T) {
        let (mut hi, mut lo) = (T::zero(), T::zero());
        // walk every submask of `mask`, including the empty set (mass 0)
        let mut sub = mask;
        loop {
            let m = masses[sub as usize];
            hi = hi.max(m);
            lo = lo.min(m);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & mask;
        }
        (hi, lo)
    }

    /// `sup_B |ν(B)|` over all subsets of the support.
    pub fn sup_abs_subset_mass<T: Scalar>(nu: &SignedMeasure<T>) -> Result<T> {
        Ok(subset_masses(nu)?
            .into_iter()
            .fold(T::zero(), |acc, m| acc.max(m.abs())))
    }

    /// `2 · sup_B |μ(B) − ν(B)|`.
    pub fn tv_by_subsets<T: Scalar>(
        mu: &ProbabilityMeasure<T>,
        nu: &ProbabilityMeasure<T>,
    ) -> Result<T> {
        let diff = mu.as_signed().difference(nu.as_signed());
        Ok(T::lit(2.0) * sup_abs_subset_mass(&diff)?)
    }
}
