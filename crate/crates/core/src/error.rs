use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures of the library's module contracts. Every message starts with the
/// name of the module whose contract was violated.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{module}: invalid parameter: {detail}")]
    InvalidParameter { module: &'static str, detail: String },

    #[error("{module}: truncation failure after {terms} terms (last partial value {partial})")]
    Truncation {
        module: &'static str,
        terms: usize,
        partial: Complex64,
    },

    #[error("{module}: sample grid mismatch: {detail}")]
    GridMismatch { module: &'static str, detail: String },

    #[error("{module}: argument outside the domain: {detail}")]
    Domain { module: &'static str, detail: String },

    #[error("{module}: non-real result, imaginary residue {residue:e}")]
    NonReal { module: &'static str, residue: f64 },

    #[error("{module}: division hazard, |denominator| = {magnitude:e}")]
    DivisionHazard { module: &'static str, magnitude: f64 },

    #[error("{module}: independent evaluations disagree, relative residual {residual:e}")]
    Disagreement { module: &'static str, residual: f64 },
}

impl Error {
    pub(crate) fn invalid(module: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidParameter {
            module,
            detail: detail.into(),
        }
    }

    pub(crate) fn grid(module: &'static str, detail: impl Into<String>) -> Self {
        Error::GridMismatch {
            module,
            detail: detail.into(),
        }
    }

    pub(crate) fn domain(module: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            module,
            detail: detail.into(),
        }
    }

    /// True for failures of the numerics themselves (series that did not
    /// converge, non-real residues, vanishing denominators), as opposed to
    /// bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Truncation { .. }
                | Error::NonReal { .. }
                | Error::DivisionHazard { .. }
                | Error::Disagreement { .. }
        )
    }
}
