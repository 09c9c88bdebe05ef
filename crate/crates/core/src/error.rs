use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not symplectic (max |S J S^T - J| = {0:e})")]
    NotSymplectic(f64),

    #[error("covariance violates the uncertainty relation: {0}")]
    NonPositiveDefinite(String),

    #[error("symplectic eigenvalue {0} is below 1/2")]
    NonPhysicalEigenvalue(f64),

    #[error("window is not canonical: sum(x w - z y) - 1 = {0}")]
    NotCanonical(f64),

    #[error("uncertainty violation: 4<q^2><p^2> - 1 = {0:e}")]
    UncertaintyViolation(f64),

    #[error("mode is pure (g = {0:e}); it has no partner")]
    NoPartner(f64),

    #[error("degenerate mode: {0}")]
    DegenerateMode(String),

    #[error("ill-conditioned Laurent fit: residual {residual:e} vs leading coefficient {leading:e}")]
    IllConditioned { residual: f64, leading: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("parse error in {field} (line {line}, column {column}): {message}")]
    Parse {
        field: String,
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub fn invalid(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::IllConditioned { .. }
                | Error::UncertaintyViolation(_)
                | Error::NonPositiveDefinite(_)
                | Error::NonPhysicalEigenvalue(_)
                | Error::DegenerateMode(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
