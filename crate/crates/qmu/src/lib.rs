//! Numerical q-series toolkit.
//!
//! The crate evaluates the classical objects of the q-world (Pochhammer
//! symbols, Jacobi theta functions, basic hypergeometric series), the
//! Appell-Lerch family built on top of them (the mu function, higher-level
//! Appell sums, the universal mock theta functions g2 and g3), linear
//! q-difference operators with Laurent-polynomial coefficients, and the
//! q-Borel / q-Laplace resummation transforms. A verification layer samples
//! random admissible parameters and measures the residual of every
//! functional identity the library claims, so the whole stack is
//! machine-checked end to end.
//!
//! Everything numeric is generic over the [`Scalar`] working precision;
//! the `*64` aliases below fix `f64`, which is what the verifier and the
//! command line run at.

pub mod context;
pub mod error;
pub mod mock_theta;
pub mod operator;
pub mod qseries;
pub mod scalar;
pub mod transforms;
pub mod verify;

#[cfg(test)]
pub(crate) mod testbrute;

pub use context::QContext;
pub use error::{QError, Result};
pub use mock_theta::MuArgs;
pub use qseries::ThetaMode;
pub use scalar::{Scalar, C};
pub use verify::{registry, run_all, run_check, Report};

/// Complex double precision scalar.
pub type C64 = num_complex::Complex<f64>;
/// Complex single precision scalar.
pub type C32 = num_complex::Complex<f32>;
/// Double precision evaluation context.
pub type Ctx64 = QContext<f64>;
/// Single precision evaluation context.
pub type Ctx32 = QContext<f32>;
/// Double precision q-difference operator.
pub type Op64 = operator::QDiffOperator<f64>;
/// Double precision Laurent polynomial.
pub type Poly64 = operator::LaurentPoly<f64>;
/// Double precision truncated power series with a prefactor exponent.
pub type Series64 = transforms::PuiseuxSeries<f64>;
