use thiserror::Error;

/// Errors raised by the analysis, shift and solver routines.
///
/// Divergent quotients are not errors: estimators report them in band as
/// `f64::INFINITY`.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("node minimum of the weight is zero; A_1 quotient undefined")]
    ZeroInfimum,

    #[error("weight has zero mass on the cube at quadrature scale")]
    ZeroMass,

    #[error("inner cube is not contained in the outer cube")]
    NotContained,

    #[error("quotient is not finite and stable for any p <= {p_max}")]
    NeverFinite { p_max: f64 },

    #[error("symbol vanishes at lattice point {m:?}")]
    ZeroDivisor { m: Vec<i64> },

    #[error("every candidate shift hits a zero divisor")]
    AllShiftsBad,

    #[error("small divisor breach at {} mode(s); first: {:?}", .modes.len(), .modes.first())]
    SmallDivisorBreach { modes: Vec<Vec<i64>>, eps_min: f64 },

    #[error("grid function is in the {found} domain, expected {expected}")]
    WrongDomainTag {
        expected: &'static str,
        found: &'static str,
    },

    #[error("malformed document: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
