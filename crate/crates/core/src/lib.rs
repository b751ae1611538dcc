//! f-divergences between finite discrete probability measures, and upper
//! bounds on the total variation certified by the inequality
//!
//! ```text
//! f(1 + TV/2) + f(1 − TV/2) ≤ D_f(μ, ν).
//! ```
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix it to `f64`, which is what the CLI uses.
//!
//! ```
//! use divbound::{bounds, divergence, ExtendedReal, ProbabilityMeasure};
//!
//! let mu = ProbabilityMeasure::from_weights(&[0.5, 0.5]).unwrap();
//! let nu = ProbabilityMeasure::from_weights(&[0.25, 0.75]).unwrap();
//! let sh = divergence::sh(&mu, &nu).unwrap();
//! let cert = bounds::invert(&divbound::builtin("sh").unwrap(), sh.value).unwrap();
//! assert!(divbound::measure::tv_distance(&mu, &nu) <= cert.tv_upper_bound);
//! # let _: ExtendedReal = sh.value;
//! ```

pub mod bounds;
pub mod cli;
pub mod divergence;
pub mod error;
pub mod extended;
pub mod generator;
pub mod io;
pub mod jointrange;
pub mod measure;
pub mod scalar;

pub use error::{Error, Result};
pub use generator::Builtin;
pub use scalar::Scalar;

pub type ExtendedReal = extended::ExtendedReal<f64>;
pub type SignedMeasure = measure::SignedMeasure<f64>;
pub type ProbabilityMeasure = measure::ProbabilityMeasure<f64>;
pub type HahnDecomposition = measure::HahnDecomposition<f64>;
pub type Generator = generator::Generator<f64>;
pub type DivergenceValue = divergence::DivergenceValue<f64>;
pub type BoundFunction = bounds::BoundFunction<f64>;
pub type TvCertificate = bounds::TvCertificate<f64>;
pub type ScanRecord = jointrange::ScanRecord<f64>;
pub type VerificationReport = jointrange::VerificationReport<f64>;
pub type TightnessGap = jointrange::TightnessGap<f64>;

/// A builtin `f64` generator by case-insensitive name.
pub fn builtin(name: &str) -> Result<Generator> {
    generator::builtin(name)
}
