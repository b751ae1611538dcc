//! Convex generators `f` with `f(1) = 0`, the perspective dual
//! `f*(x) = x f(1/x)`, and grid checks for convexity and separation.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::scalar::Scalar;

/// Below this distance from 1 a separation check does not demand strict positivity.
pub const SEPARATION_EXCLUSION: f64 = 1e-3;
/// Slack allowed in grid inequality checks.
pub const GRID_TOLERANCE: f64 = 1e-12;

/// Sample point and blow-up threshold for estimating `lim x f(1/x)` at `0⁺`.
const DUAL_ZERO_PROBE: f64 = 1e-12;
const DUAL_ZERO_BLOWUP: f64 = 1e10;

/// The generators that ship with the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// Squared Hellinger, `(√x − 1)²`.
    Hellinger,
    /// Total variation, `|x − 1|`.
    TotalVariation,
    /// Kullback–Leibler, `x log x`.
    KullbackLeibler,
    /// Pearson χ², `(x − 1)²`.
    Pearson,
    /// Shannon (reverse KL), `−log x`, the dual of KL.
    Shannon,
}

impl Builtin {
    pub const ALL: [Builtin; 5] = [
        Builtin::Hellinger,
        Builtin::TotalVariation,
        Builtin::KullbackLeibler,
        Builtin::Pearson,
        Builtin::Shannon,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Hellinger => "HE",
            Builtin::TotalVariation => "TV",
            Builtin::KullbackLeibler => "KL",
            Builtin::Pearson => "PE",
            Builtin::Shannon => "SH",
        }
    }

    pub fn generator<T: Scalar>(self) -> Generator<T> {
        let one = T::one();
        let (eval, at_zero, slope, sep): (fn(T) -> T, _, _, _) = match self {
            Builtin::Hellinger => (
                |x: T| (x.sqrt() - T::one()).powi(2),
                ExtendedReal::Finite(one),
                ExtendedReal::Finite(one),
                Some(T::zero()),
            ),
            Builtin::TotalVariation => (
                |x: T| (x - T::one()).abs(),
                ExtendedReal::Finite(one),
                ExtendedReal::Finite(one),
                None,
            ),
            Builtin::KullbackLeibler => (
                |x: T| x * x.ln(),
                ExtendedReal::zero(),
                ExtendedReal::Infinite,
                Some(one),
            ),
            Builtin::Pearson => (
                |x: T| (x - T::one()).powi(2),
                ExtendedReal::Finite(one),
                ExtendedReal::Infinite,
                Some(T::zero()),
            ),
            Builtin::Shannon => (
                |x: T| -x.ln(),
                ExtendedReal::Infinite,
                ExtendedReal::zero(),
                Some(-one),
            ),
        };
        Generator {
            name: self.name().to_string(),
            eval: Arc::new(move |x| ExtendedReal::from_float(eval(x))),
            value_at_zero: at_zero,
            slope_at_infinity: Some(slope),
            separation: sep,
            known_convex: true,
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Case-insensitive generator names: `he`, `tv`, `kl`, `pe`, `sh`.
impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownGenerator(s.to_string()))
    }
}

/// Looks up a builtin generator by name.
pub fn builtin<T: Scalar>(name: &str) -> Result<Generator<T>> {
    Ok(name.parse::<Builtin>()?.generator())
}

type EvalFn<T> = Arc<dyn Fn(T) -> ExtendedReal<T> + Send + Sync>;

/// A convex function on `[0, ∞)` vanishing at 1.
///
/// The value at 0 is stored, not evaluated: `eval(0)` returns
/// [`Generator::value_at_zero`], which stands for the limit `f(0⁺)`.
#[derive(Clone)]
pub struct Generator<T> {
    name: String,
    eval: EvalFn<T>,
    value_at_zero: ExtendedReal<T>,
    /// `lim f(x)/x` as `x → ∞`; becomes the dual's value at zero.
    slope_at_infinity: Option<ExtendedReal<T>>,
    separation: Option<T>,
    known_convex: bool,
}

impl<T: Scalar> fmt::Debug for Generator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Generator")
            .field("name", &self.name)
            .field("value_at_zero", &self.value_at_zero)
            .field("slope_at_infinity", &self.slope_at_infinity)
            .field("separation", &self.separation)
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> Generator<T> {
    /// A user-supplied generator. `f` is called on `x > 0` only; a `+inf`
    /// return is read as `+∞`. Fails unless `f(1) == 0` exactly.
    ///
    /// Convexity is not assumed: [`crate::bounds::invert`] grid-checks
    /// custom generators before bisecting.
    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(T) -> T + Send + Sync + 'static,
        value_at_zero: ExtendedReal<T>,
    ) -> Result<Self> {
        let name = name.into();
        let at_one = f(T::one());
        if at_one != T::zero() {
            return Err(Error::InvalidGenerator(format!(
                "{name}: f(1) = {at_one}, expected 0"
            )));
        }
        let label = name.clone();
        Ok(Self {
            name,
            eval: Arc::new(move |x| {
                ExtendedReal::new(f(x))
                    .unwrap_or_else(|| panic!("generator {label} returned {} at {x}", f(x)))
            }),
            value_at_zero,
            slope_at_infinity: None,
            separation: None,
            known_convex: false,
        })
    }

    /// Attaches a separation coefficient `a` (see [`check_separation`]).
    pub fn with_separation(mut self, a: T) -> Self {
        self.separation = Some(a);
        self
    }

    /// Overrides `f(0⁺)`.
    pub fn with_value_at_zero(mut self, v: ExtendedReal<T>) -> Self {
        self.value_at_zero = v;
        self
    }

    /// Records `lim f(x)/x`, which makes [`dual`] exact at zero.
    pub fn with_slope_at_infinity(mut self, s: ExtendedReal<T>) -> Self {
        self.slope_at_infinity = Some(s);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value_at_zero(&self) -> ExtendedReal<T> {
        self.value_at_zero
    }

    pub fn separation_coefficient(&self) -> Option<T> {
        self.separation
    }

    pub fn slope_at_infinity(&self) -> Option<ExtendedReal<T>> {
        self.slope_at_infinity
    }

    /// Whether convexity is known by construction (builtins and their duals).
    pub fn is_known_convex(&self) -> bool {
        self.known_convex
    }

    /// `f(x)` for `x ≥ 0`.
    ///
    /// # Panics
    /// If `x` is negative or NaN.
    pub fn eval(&self, x: T) -> ExtendedReal<T> {
        assert!(
            x >= T::zero(),
            "generator {} evaluated at {x} outside [0, inf)",
            self.name
        );
        if x == T::zero() {
            self.value_at_zero
        } else {
            (self.eval)(x)
        }
    }

    /// `g(x) = f(x) − a(x − 1)`.
    pub fn shifted(&self, a: T, x: T) -> ExtendedReal<T> {
        match self.eval(x) {
            ExtendedReal::Finite(v) => ExtendedReal::from_float(v - a * (x - T::one())),
            ExtendedReal::Infinite => ExtendedReal::Infinite,
        }
    }

    /// Checks `f(1) = 0` and midpoint convexity on `grid`, and the stored
    /// separation coefficient if any.
    pub fn validate(&self, grid: &[T]) -> Result<()> {
        if self.eval(T::one()) != ExtendedReal::zero() {
            return Err(Error::InvalidGenerator(format!("{}: f(1) != 0", self.name)));
        }
        if !is_midpoint_convex(self, grid) {
            return Err(Error::InvalidGenerator(format!(
                "{}: not midpoint convex on grid",
                self.name
            )));
        }
        if let Some(a) = self.separation {
            if !check_separation(self, a, grid) {
                return Err(Error::InvalidGenerator(format!(
                    "{}: separation fails for a = {a}",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

/// The perspective `f*(x) = x f(1/x)`, so that `D_{f*}(μ, ν) = D_f(ν, μ)`.
///
/// `f*(0⁺)` equals `lim f(x)/x`; when the generator records that slope it is
/// used as is, otherwise `x f(1/x)` is probed at `x = 1e-12` and read as `+∞`
/// above `1e10`. The probe is a heuristic: slowly diverging limits such as the
/// one for `x log x` are not detected, so give custom generators an explicit
/// slope when it matters. The separation coefficient maps `a ↦ −a`.
pub fn dual<T: Scalar>(f: &Generator<T>) -> Generator<T> {
    let inner = f.clone();
    let eval: EvalFn<T> = Arc::new(move |x: T| inner.eval(T::one() / x).scale(x));
    let value_at_zero = f.slope_at_infinity.unwrap_or_else(|| {
        let x = T::lit(DUAL_ZERO_PROBE);
        match f.eval(T::one() / x).scale(x) {
            ExtendedReal::Finite(v) if v <= T::lit(DUAL_ZERO_BLOWUP) => ExtendedReal::Finite(v),
            _ => ExtendedReal::Infinite,
        }
    });
    Generator {
        name: format!("dual({})", f.name),
        eval,
        value_at_zero,
        slope_at_infinity: Some(f.value_at_zero),
        separation: f.separation.map(|a| -a),
        known_convex: f.known_convex,
    }
}

/// True iff `g(x) = f(x) − a(x − 1)` is `≥ −1e-12` on the whole grid and
/// `> 1e-12` wherever `|x − 1| ≥ 1e-3`.
pub fn check_separation<T: Scalar>(f: &Generator<T>, a: T, grid: &[T]) -> bool {
    let tol = T::tol(GRID_TOLERANCE);
    let exclusion = T::lit(SEPARATION_EXCLUSION);
    grid.iter().all(|&x| {
        let g = f.shifted(a, x);
        g >= -tol && ((x - T::one()).abs() < exclusion || g > tol)
    })
}

/// `f((x+y)/2) ≤ (f(x) + f(y))/2 + 1e-12` for all pairs of grid points.
pub fn is_midpoint_convex<T: Scalar>(f: &Generator<T>, grid: &[T]) -> bool {
    let tol = T::tol(GRID_TOLERANCE);
    let two = T::lit(2.0);
    let values: Vec<ExtendedReal<T>> = grid.iter().map(|&x| f.eval(x)).collect();
    grid.iter().enumerate().all(|(i, &x)| {
        grid[i..]
            .iter()
            .zip(&values[i..])
            .all(|(&y, &fy)| match values[i] + fy {
                ExtendedReal::Infinite => true,
                ExtendedReal::Finite(sum) => f.eval((x + y) / two) <= sum / two + tol,
            })
    })
}

/// `n + 1` evenly spaced points `lo, ..., hi`.
pub fn uniform_grid<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    let n_t = T::from_usize(n).expect("grid size fits scalar");
    (0..=n)
        .map(|i| {
            if i == n {
                hi
            } else {
                lo + (hi - lo) * T::from_usize(i).expect("index fits scalar") / n_t
            }
        })
        .collect()
}

/// `{0, 0.01, ..., 10}`.
pub fn default_grid<T: Scalar>() -> Vec<T> {
    uniform_grid(T::zero(), T::lit(10.0), 1000)
}
