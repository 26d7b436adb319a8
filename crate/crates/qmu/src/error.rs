//! Error taxonomy shared by every evaluator in the crate.

use thiserror::Error;

/// Everything that can go wrong while evaluating a q-series quantity.
///
/// Evaluators never let NaN or infinity escape: a non-finite intermediate
/// turns into [`QError::NonFinite`], proximity to a pole turns into
/// [`QError::Pole`] before the division happens.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    /// The nome must satisfy `0 < |q| < 1` strictly.
    #[error("nome modulus {modulus} is outside the open unit annulus (need 0 < |q| < 1)")]
    InvalidNome { modulus: f64 },

    /// A context parameter failed validation.
    #[error("invalid context parameter: {0}")]
    InvalidContext(String),

    /// An adaptive sum, product, or quadrature hit its budget before converging.
    #[error("{what}: no convergence within budget {budget}")]
    Truncation { what: String, budget: usize },

    /// An input sits inside the guard zone around a pole.
    #[error("{what}: within pole guard ({detail})")]
    Pole { what: String, detail: String },

    /// An input lies outside the operation's domain.
    #[error("domain: {0}")]
    Domain(String),

    /// The requested series diverges and cannot be summed numerically.
    #[error("divergent series: {0}")]
    Divergent(String),

    /// A denominator parameter of a formal solution degenerates to `q^{-N}`.
    #[error("resonant parameters: {0}")]
    Resonance(String),

    /// A computation produced NaN or infinity.
    #[error("non-finite result in {0}")]
    NonFinite(String),

    /// The verification registry has no check with the requested name.
    #[error("unknown check: {0}")]
    UnknownCheck(String),
}

pub type Result<T> = core::result::Result<T, QError>;

impl QError {
    pub(crate) fn truncation(what: impl Into<String>, budget: usize) -> Self {
        QError::Truncation { what: what.into(), budget }
    }

    pub(crate) fn pole(what: impl Into<String>, detail: impl Into<String>) -> Self {
        QError::Pole { what: what.into(), detail: detail.into() }
    }
}
