//! Linear q-difference operators `sum_k c_k(x) T^k`, where `T` is the
//! q-shift `(Tf)(x) = f(qx)` and each coefficient `c_k` is a Laurent
//! polynomial in `x`.
//!
//! Operators compose through the commutation rule `T * x^j = q^j x^j * T`,
//! i.e. coefficients pass through a shift as `c(x) -> c(x q^k)`. The
//! module builds the handful of named operators used by the verification
//! suite, applies operators to numeric function handles, and computes
//! Newton-Puiseux diagrams.
//!
//! Newton-Puiseux convention: the point set is `(k, l)` for every nonzero
//! monomial `x^k` of the order-`l` coefficient, including `l = 0`; the
//! "lower boundary" is the convex hull seen from below (minimal `l` for
//! each `k`), traversed by increasing `k`, so its slopes are nondecreasing
//! exact rationals.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex;
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::context::QContext;
use crate::error::Result;
use crate::scalar::{cpow, Scalar, C};

/// Laurent polynomial in one variable with complex coefficients. Zero
/// coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentPoly<T: Scalar> {
    monomials: BTreeMap<i64, C<T>>,
}

impl<T: Scalar> LaurentPoly<T> {
    pub fn zero() -> Self {
        Self {
            monomials: BTreeMap::new(),
        }
    }

    pub fn constant(c: C<T>) -> Self {
        Self::monomial(0, c)
    }

    pub fn one() -> Self {
        Self::constant(Complex::one())
    }

    /// The single monomial `c x^power`.
    pub fn monomial(power: i64, c: C<T>) -> Self {
        let mut monomials = BTreeMap::new();
        if !c.is_zero() {
            monomials.insert(power, c);
        }
        Self { monomials }
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut monomials = self.monomials.clone();
        for (&p, &c) in &other.monomials {
            let entry = monomials.entry(p).or_insert_with(Complex::zero);
            *entry = *entry + c;
            if entry.is_zero() {
                monomials.remove(&p);
            }
        }
        Self { monomials }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut monomials: BTreeMap<i64, C<T>> = BTreeMap::new();
        for (&p, &a) in &self.monomials {
            for (&r, &b) in &other.monomials {
                let entry = monomials.entry(p + r).or_insert_with(Complex::zero);
                *entry = *entry + a * b;
            }
        }
        monomials.retain(|_, c| !c.is_zero());
        Self { monomials }
    }

    pub fn scale(&self, c: C<T>) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            monomials: self.monomials.iter().map(|(&p, &a)| (p, a * c)).collect(),
        }
    }

    /// Substitution `c(x) -> c(s x)`: the `x^p` coefficient picks up `s^p`.
    pub fn dilate(&self, s: C<T>) -> Self {
        let mut monomials: BTreeMap<i64, C<T>> = BTreeMap::new();
        for (&p, &a) in &self.monomials {
            let c = a * s.powi(p as i32);
            if !c.is_zero() {
                monomials.insert(p, c);
            }
        }
        Self { monomials }
    }

    pub fn eval(&self, x: C<T>) -> C<T> {
        self.monomials
            .iter()
            .fold(Complex::zero(), |acc, (&p, &c)| acc + c * x.powi(p as i32))
    }

    /// Iterate `(power, coefficient)` pairs in increasing power order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, C<T>)> + '_ {
        self.monomials.iter().map(|(&p, &c)| (p, c))
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.monomials.keys().next_back().copied()
    }
}

/// Linear q-difference operator `sum_k c_k(x) T^k` over a fixed nome.
#[derive(Debug, Clone, PartialEq)]
pub struct QDiffOperator<T: Scalar> {
    terms: BTreeMap<usize, LaurentPoly<T>>,
    base: C<T>,
}

impl<T: Scalar> QDiffOperator<T> {
    /// The identity operator (order 0, coefficient 1).
    pub fn identity(base: C<T>) -> Self {
        Self::from_terms([(0, LaurentPoly::one())], base)
    }

    /// The bare shift `T`.
    pub fn shift(base: C<T>) -> Self {
        Self::from_terms([(1, LaurentPoly::one())], base)
    }

    pub fn from_terms(
        terms: impl IntoIterator<Item = (usize, LaurentPoly<T>)>,
        base: C<T>,
    ) -> Self {
        let terms: BTreeMap<usize, LaurentPoly<T>> = terms
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        assert!(!terms.is_empty(), "operator must have at least one term");
        Self { terms, base }
    }

    pub fn base(&self) -> C<T> {
        self.base
    }

    pub fn order(&self) -> usize {
        *self.terms.keys().next_back().expect("operator is nonempty")
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &LaurentPoly<T>)> {
        self.terms.iter().map(|(&k, c)| (k, c))
    }

    pub fn coefficient(&self, order: usize) -> Option<&LaurentPoly<T>> {
        self.terms.get(&order)
    }

    /// Operator composition `self . rhs` (apply `rhs` first). Coefficients
    /// of `rhs` pass through `T^k` as `c(x) -> c(x base^k)`.
    pub fn compose(&self, rhs: &Self) -> Self {
        assert_eq!(self.base, rhs.base, "operators must share the nome");
        let mut terms: BTreeMap<usize, LaurentPoly<T>> = BTreeMap::new();
        for (&ka, ca) in &self.terms {
            let s = self.base.powi(ka as i32);
            for (&kb, cb) in &rhs.terms {
                let contrib = ca.mul(&cb.dilate(s));
                let entry = terms.entry(ka + kb).or_insert_with(LaurentPoly::zero);
                *entry = entry.add(&contrib);
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Self::from_terms(terms, self.base)
    }

    /// Operator sum.
    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.base, rhs.base, "operators must share the nome");
        let mut terms = self.terms.clone();
        for (&k, c) in &rhs.terms {
            let entry = terms.entry(k).or_insert_with(LaurentPoly::zero);
            *entry = entry.add(c);
        }
        terms.retain(|_, c| !c.is_zero());
        Self::from_terms(terms, self.base)
    }

    /// `sum_k c_k(x) f(x base^k)`.
    pub fn apply_numeric(
        &self,
        f: impl Fn(C<T>) -> Result<C<T>>,
        x: C<T>,
    ) -> Result<C<T>> {
        let mut total: C<T> = Complex::zero();
        for (&k, c) in &self.terms {
            total = total + c.eval(x) * f(x * self.base.powi(k as i32))?;
        }
        Ok(total)
    }

    /// Cancellation-relative residual
    /// `|sum_k c_k(x) f(x base^k)| / sum_k |c_k(x) f(x base^k)|`,
    /// 0 when every term underflows to zero. A function annihilated by the
    /// operator scores near machine epsilon; a generic function scores
    /// O(1) regardless of its magnitude.
    pub fn relative_residual(
        &self,
        f: impl Fn(C<T>) -> Result<C<T>>,
        x: C<T>,
    ) -> Result<T> {
        let mut total: C<T> = Complex::zero();
        let mut scale = T::zero();
        for (&k, c) in &self.terms {
            let term = c.eval(x) * f(x * self.base.powi(k as i32))?;
            total = total + term;
            scale = scale + term.norm();
        }
        if scale.is_zero() {
            return Ok(T::zero());
        }
        Ok(total.norm() / scale)
    }

    /// Newton-Puiseux diagram of the operator (see the module docs for the
    /// orientation convention).
    pub fn newton_puiseux(&self) -> NPDiagram {
        let mut points = BTreeSet::new();
        for (&l, c) in &self.terms {
            for (k, _) in c.iter() {
                points.insert((k, l as i64));
            }
        }
        let mut floor: BTreeMap<i64, i64> = BTreeMap::new();
        for &(k, l) in &points {
            let entry = floor.entry(k).or_insert(l);
            *entry = (*entry).min(l);
        }
        let candidates: Vec<(i64, i64)> = floor.into_iter().collect();
        let mut hull: Vec<(i64, i64)> = Vec::new();
        for p in candidates {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
                if cross <= 0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        let slopes = hull
            .windows(2)
            .map(|w| Ratio::new(w[1].1 - w[0].1, w[1].0 - w[0].0))
            .collect();
        NPDiagram {
            points,
            hull_vertices: hull,
            slopes,
        }
    }
}

/// Newton-Puiseux diagram: full point set, lower-hull vertices in
/// increasing `k`, and the exact slopes between consecutive vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NPDiagram {
    pub points: BTreeSet<(i64, i64)>,
    pub hull_vertices: Vec<(i64, i64)>,
    pub slopes: Vec<Ratio<i64>>,
}

/// `prod_k (T - q^{alpha_k})`, expanded. The empty product is the
/// identity.
pub fn op_from_roots<T: Scalar>(exponents: &[C<T>], ctx: &QContext<T>) -> QDiffOperator<T> {
    let q = ctx.q();
    let mut op = QDiffOperator::identity(q);
    for &alpha in exponents {
        let factor = QDiffOperator::from_terms(
            [
                (1, LaurentPoly::one()),
                (0, LaurentPoly::constant(-cpow(q, alpha))),
            ],
            q,
        );
        op = op.compose(&factor);
    }
    op
}

/// `[prod_k (T - q^{alpha_k})] (T + x q^alpha)`: the operator whose
/// solution space extends the one-factor equation `f(qx) = -x q^alpha f(x)`
/// by the exponents `alpha_k`.
pub fn op_linear_eq<T: Scalar>(
    alpha: C<T>,
    alpha_list: &[C<T>],
    ctx: &QContext<T>,
) -> QDiffOperator<T> {
    let q = ctx.q();
    let last = QDiffOperator::from_terms(
        [
            (1, LaurentPoly::one()),
            (0, LaurentPoly::monomial(1, cpow(q, alpha))),
        ],
        q,
    );
    op_from_roots(alpha_list, ctx).compose(&last)
}

/// `[prod_{k=1}^{m} (T - q^{k-1})] (T + x^m / y)`: annihilates
/// `x -> G_m(x, y)`.
pub fn op_appell<T: Scalar>(m: u32, y: C<T>, ctx: &QContext<T>) -> QDiffOperator<T> {
    assert!(m >= 1, "level must be at least 1");
    assert!(!y.is_zero(), "y must be nonzero");
    let q = ctx.q();
    let roots: Vec<C<T>> = (1..=m)
        .map(|k| Complex::from(crate::scalar::real::<T>(f64::from(k - 1))))
        .collect();
    let last = QDiffOperator::from_terms(
        [
            (1, LaurentPoly::one()),
            (0, LaurentPoly::monomial(m as i64, y.inv())),
        ],
        q,
    );
    op_from_roots(&roots, ctx).compose(&last)
}

/// `[prod_{k=1}^{m-1} (T - q^k)] (T + x^m)`: annihilates `x -> G_m(x, 1)`.
pub fn op_gm1<T: Scalar>(m: u32, ctx: &QContext<T>) -> QDiffOperator<T> {
    assert!(m >= 1, "level must be at least 1");
    let q = ctx.q();
    let roots: Vec<C<T>> = (1..m)
        .map(|k| Complex::from(crate::scalar::real::<T>(f64::from(k))))
        .collect();
    let last = QDiffOperator::from_terms(
        [
            (1, LaurentPoly::one()),
            (0, LaurentPoly::monomial(m as i64, Complex::one())),
        ],
        q,
    );
    op_from_roots(&roots, ctx).compose(&last)
}

/// `T prod_k (T - q^{alpha_k}) + x prod_k (T - q^{beta_k})`: the order-m
/// equation whose formal and integral solutions the transforms module
/// constructs.
pub fn op_diver<T: Scalar>(
    alpha_list: &[C<T>],
    beta_list: &[C<T>],
    ctx: &QContext<T>,
) -> QDiffOperator<T> {
    assert_eq!(
        alpha_list.len(),
        beta_list.len(),
        "exponent lists must have equal length"
    );
    let q = ctx.q();
    let first = QDiffOperator::shift(q).compose(&op_from_roots(alpha_list, ctx));
    let second = QDiffOperator::from_terms([(0, LaurentPoly::monomial(1, Complex::one()))], q)
        .compose(&op_from_roots(beta_list, ctx));
    first.add(&second)
}
