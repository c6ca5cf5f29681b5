use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{op} requires a {expected} group")]
    WrongGroupKind {
        op: &'static str,
        expected: &'static str,
    },

    #[error("invalid H-type structure: {0}")]
    InvalidStructure(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("quadrature reached error {achieved:e} but {requested:e} was requested")]
    QuadratureNonConvergence { achieved: f64, requested: f64 },

    #[error("bump radius {rho} exceeds the certified maximum {max}")]
    CertificateViolation { rho: f64, max: f64 },

    #[error("inconsistent bounds: lower {lower} exceeds upper {upper}")]
    InconsistentBounds { lower: f64, upper: f64 },

    #[error("degenerate diameter {0}")]
    DegenerateDiameter(f64),
}

impl Error {
    /// True for failures of an iterative numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::QuadratureNonConvergence { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
