use thiserror::Error;

use crate::gfpoly::FpPoly;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("weight {0} is odd; level-one cusp forms of odd weight vanish")]
    OddWeight(u32),

    #[error("weight {weight} is below the supported minimum {min}")]
    WeightTooSmall { weight: u32, min: u32 },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("Hecke index {p} must differ from the modulus {ell}")]
    IndexEqualsModulus { p: u64, ell: u64 },

    #[error("modulus {ell} is not supported here (expected one of {expected})")]
    UnsupportedModulus { ell: u64, expected: &'static str },

    #[error("q-expansion has precision {available}, but {needed} coefficients are required")]
    InsufficientPrecision { needed: usize, available: usize },

    #[error("polynomial is not monic")]
    NotMonic,

    #[error("the zero polynomial has no factorization")]
    ZeroPolynomial,

    #[error("inexact division over F_{modulus}: remainder {remainder}")]
    InexactDivision { modulus: u64, remainder: FpPoly },

    #[error("the cusp space of weight {0} is zero-dimensional")]
    EmptySpace(u32),

    #[error("trace formula produced the non-integral value {0}")]
    NonIntegralTrace(String),

    #[error("no period found for {what} within {searched} steps")]
    PeriodNotFound { what: String, searched: usize },

    #[error("divisibility violated: T_{{{p},{next}}} is not a multiple of T_{{{p},{k}}} mod {ell} (remainder {remainder})")]
    DivisibilityViolation {
        p: u64,
        ell: u64,
        k: u32,
        next: u32,
        remainder: FpPoly,
    },

    #[error("T_{{{p},{k}}} mod {ell} does not split into linear factors: {detail}")]
    SplittingViolation {
        p: u64,
        k: u32,
        ell: u64,
        detail: String,
    },

    #[error("evidence for T_{{{p},{k}}} mod {ell} contradicts the tabulated factorization: {detail}")]
    EvidenceMismatch {
        p: u64,
        k: u32,
        ell: u64,
        detail: String,
    },

    #[error("cache error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True when the error means a mathematical statement the tables rest on
    /// failed, as opposed to bad input or an I/O problem.
    pub fn is_falsification(&self) -> bool {
        matches!(
            self,
            Error::DivisibilityViolation { .. }
                | Error::SplittingViolation { .. }
                | Error::NonIntegralTrace(_)
                | Error::PeriodNotFound { .. }
                | Error::EvidenceMismatch { .. }
        )
    }

    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::OddWeight(_)
                | Error::WeightTooSmall { .. }
                | Error::NotPrime(_)
                | Error::IndexEqualsModulus { .. }
                | Error::UnsupportedModulus { .. }
                | Error::EmptySpace(_)
                | Error::NotMonic
        )
    }
}
