use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// `μ` charges an atom that `ν` does not.
    #[error("absolute continuity violated at atom {atom:?}: mu > 0 but nu = 0")]
    AbsoluteContinuityViolation { atom: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown generator {0:?} (expected one of HE, TV, KL, PE, SH)")]
    UnknownGenerator(String),

    #[error("bound function of generator {0:?} is not monotone on [0, 1]")]
    NonMonotoneGenerator(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("subset enumeration supports at most {max} atoms, got {atoms}")]
    OracleTooLarge { atoms: usize, max: usize },

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
