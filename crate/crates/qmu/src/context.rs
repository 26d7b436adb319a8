//! Evaluation context: the nome plus tolerances and truncation budgets.

use num_complex::Complex;
use num_traits::One;

use crate::error::{QError, Result};
use crate::scalar::{real, Scalar, C};

/// Default term budget for adaptive sums and products.
pub const DEFAULT_MAX_TERMS: usize = 512;
/// Smallest term budget a context accepts.
pub const MIN_MAX_TERMS: usize = 8;
/// Default node count the contour quadrature starts from.
pub const DEFAULT_CONTOUR_POINTS: usize = 64;
/// Smallest starting node count a context accepts.
pub const MIN_CONTOUR_POINTS: usize = 16;
/// Hard cap on contour nodes reached by doubling.
pub const MAX_CONTOUR_POINTS: usize = 1 << 14;
/// Default sampler seed.
pub const DEFAULT_SEED: u64 = 1;

/// Shared parameters for every evaluator: the nome `q`, the adaptive
/// truncation tolerance, term and node budgets, the contour radius override,
/// and the seed the verification samplers derive their streams from.
///
/// Construction and every `with_*` builder validate their argument, so a
/// context in hand always satisfies `0 < |q| < 1`, `tol > 0`,
/// `max_terms >= 8`, and `contour_points >= 16`.
#[derive(Debug, Clone)]
pub struct QContext<T: Scalar> {
    q: C<T>,
    max_terms: usize,
    tol: T,
    contour_radius: Option<T>,
    contour_points: usize,
    seed: u64,
}

impl<T: Scalar> QContext<T> {
    /// Context with the given nome and default tolerances.
    ///
    /// The default tolerance is ten machine epsilons of the working
    /// precision, which keeps adaptive truncation error negligible against
    /// the identity-check thresholds.
    pub fn new(q: C<T>) -> Result<Self> {
        let ctx = QContext {
            q: Complex::one(),
            max_terms: DEFAULT_MAX_TERMS,
            tol: T::epsilon() * real(10.0),
            contour_radius: None,
            contour_points: DEFAULT_CONTOUR_POINTS,
            seed: DEFAULT_SEED,
        };
        ctx.with_nome(q)
    }

    /// Real nome convenience constructor.
    pub fn real_nome(q: T) -> Result<Self> {
        Self::new(Complex::new(q, T::zero()))
    }

    /// Replaces the nome, revalidating `0 < |q| < 1`.
    pub fn with_nome(&self, q: C<T>) -> Result<Self> {
        let modulus = q.norm();
        if !(modulus > T::zero() && modulus < T::one()) || !modulus.is_finite() {
            return Err(QError::InvalidNome {
                modulus: modulus.to_f64().unwrap_or(f64::NAN),
            });
        }
        let mut ctx = self.clone();
        ctx.q = q;
        Ok(ctx)
    }

    /// Context with nome `q^m`, everything else unchanged.
    ///
    /// Used wherever an identity mixes bases, for example a theta function
    /// in nome `q^m` inside an identity stated in nome `q`. `m >= 1`, and
    /// `|q^m| <= |q| < 1` keeps the result valid by construction.
    pub fn rebased(&self, m: u32) -> Self {
        assert!(m >= 1, "rebasing power must be at least 1");
        let mut ctx = self.clone();
        ctx.q = self.q.powu(m);
        ctx
    }

    pub fn with_tol(&self, tol: T) -> Result<Self> {
        if tol <= T::zero() || !tol.is_finite() {
            return Err(QError::InvalidContext(format!("tol must be positive and finite, got {tol}")));
        }
        let mut ctx = self.clone();
        ctx.tol = tol;
        Ok(ctx)
    }

    pub fn with_max_terms(&self, max_terms: usize) -> Result<Self> {
        if max_terms < MIN_MAX_TERMS {
            return Err(QError::InvalidContext(format!(
                "max_terms must be at least {MIN_MAX_TERMS}, got {max_terms}"
            )));
        }
        let mut ctx = self.clone();
        ctx.max_terms = max_terms;
        Ok(ctx)
    }

    /// Fixes the contour radius for the minus q-Laplace quadrature.
    ///
    /// Without an override each integral picks its radius from the pole
    /// lattices of its integrand (see the transforms module).
    pub fn with_contour_radius(&self, r: T) -> Result<Self> {
        if r <= T::zero() || !r.is_finite() {
            return Err(QError::InvalidContext(format!(
                "contour_radius must be positive and finite, got {r}"
            )));
        }
        let mut ctx = self.clone();
        ctx.contour_radius = Some(r);
        Ok(ctx)
    }

    /// Starting node count for the doubling contour quadrature.
    pub fn with_contour_points(&self, n: usize) -> Result<Self> {
        if !(MIN_CONTOUR_POINTS..=MAX_CONTOUR_POINTS).contains(&n) {
            return Err(QError::InvalidContext(format!(
                "contour_points must lie in {MIN_CONTOUR_POINTS}..={MAX_CONTOUR_POINTS}, got {n}"
            )));
        }
        let mut ctx = self.clone();
        ctx.contour_points = n;
        Ok(ctx)
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        let mut ctx = self.clone();
        ctx.seed = seed;
        ctx
    }

    pub fn q(&self) -> C<T> {
        self.q
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    pub fn tol(&self) -> T {
        self.tol
    }

    pub fn contour_radius(&self) -> Option<T> {
        self.contour_radius
    }

    pub fn contour_points(&self) -> usize {
        self.contour_points
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}
