//! q-Pochhammer symbols, the Jacobi theta function, and basic
//! hypergeometric series.
//!
//! Conventions, with `0 < |q| < 1` throughout:
//!
//! ```text
//! (x; q)_n   = prod_{j=0..n-1} (1 - x q^j)
//! (x; q)_oo  = prod_{j>=0}     (1 - x q^j)
//! (x; q)_nu  = (x; q)_oo / (x q^nu; q)_oo        (principal branch of q^nu)
//!
//! theta_q(x) = sum_{n in Z} x^n q^{n(n-1)/2}
//!            = (q; q)_oo (-x; q)_oo (-q/x; q)_oo
//! ```
//!
//! The basic hypergeometric series carries the balancing factor that makes
//! parameter counts other than `r = s + 1` meaningful:
//!
//! ```text
//! r_phi_s(a_1..a_r; b_1..b_s; q; z)
//!   = sum_{n>=0} [ (a_1..a_r; q)_n / ((b_1..b_s; q)_n (q; q)_n) ]
//!                [ (-1)^n q^{n(n-1)/2} ]^{s-r+1}  z^n
//! ```
//!
//! Adaptive truncation is shared by every series and product here: a tail
//! stops once three consecutive terms are below `tol` relative to the
//! accumulated value, and a bilateral sum truncates each tail
//! independently by that rule.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::context::QContext;
use crate::error::{QError, Result};
use crate::scalar::{cpow, finite, Scalar, C};

/// Relative distance below which an evaluator treats a denominator as a
/// pole and refuses to divide. Samplers keep parameters at least `1e-6`
/// away from pole lattices, so anything closer than this is a genuine
/// domain violation rather than an unlucky draw.
pub const POLE_GUARD: f64 = 1e-8;

/// How many consecutive negligible terms end an adaptive tail.
const STREAK: u32 = 3;

/// Evaluation mode for [`theta`]: the bilateral sum or the triple product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaMode {
    Sum,
    Product,
}

/// Finite q-Pochhammer symbol `(x; q)_n`.
pub fn qpoch_finite<T: Scalar>(x: C<T>, n: u32, ctx: &QContext<T>) -> C<T> {
    let one: C<T> = Complex::one();
    let mut product = one;
    let mut xqj = x;
    for _ in 0..n {
        product = product * (one - xqj);
        xqj = xqj * ctx.q();
    }
    product
}

/// Infinite q-Pochhammer symbol `(x; q)_oo`.
///
/// The product is truncated once three consecutive factors each change it
/// by less than `tol` relatively; it errors with [`QError::Truncation`] if
/// the budget runs out first.
pub fn qpoch_inf<T: Scalar>(x: C<T>, ctx: &QContext<T>) -> Result<C<T>> {
    qpoch_inf_scaled(x, ctx).map(|(value, _)| value)
}

/// `(x; q)_oo` together with the smallest relative factor magnitude
/// `|1 - x q^j| / (1 + |x q^j|)` met along the way.
///
/// Callers that put the product in a denominator use the second component
/// to detect proximity to a zero of the product.
pub(crate) fn qpoch_inf_scaled<T: Scalar>(x: C<T>, ctx: &QContext<T>) -> Result<(C<T>, T)> {
    let one: C<T> = Complex::one();
    let mut product = one;
    let mut xqj = x;
    let mut min_rel = T::infinity();
    let mut streak = 0u32;
    for _ in 0..=ctx.max_terms() {
        let factor = one - xqj;
        let rel = factor.norm() / (T::one() + xqj.norm());
        if rel < min_rel {
            min_rel = rel;
        }
        product = product * factor;
        if xqj.norm() <= ctx.tol() {
            streak += 1;
            if streak >= STREAK {
                if !finite(product) {
                    return Err(QError::NonFinite("qpoch_inf".into()));
                }
                return Ok((product, min_rel));
            }
        } else {
            streak = 0;
        }
        xqj = xqj * ctx.q();
    }
    Err(QError::truncation("qpoch_inf", ctx.max_terms()))
}

/// q-Pochhammer symbol of complex order, `(x; q)_nu = (x; q)_oo / (x q^nu; q)_oo`.
pub fn qpoch_nu<T: Scalar>(x: C<T>, nu: C<T>, ctx: &QContext<T>) -> Result<C<T>> {
    let qnu = cpow(ctx.q(), nu);
    let numerator = qpoch_inf(x, ctx)?;
    let denominator = qpoch_inf(x * qnu, ctx)?;
    if denominator.norm() < ctx.tol() * ctx.tol() {
        return Err(QError::pole(
            "qpoch_nu",
            format!("(x q^nu; q)_oo has modulus {:e}", denominator.norm()),
        ));
    }
    let value = numerator / denominator;
    if !finite(value) {
        return Err(QError::NonFinite("qpoch_nu".into()));
    }
    Ok(value)
}

/// Jacobi theta function `theta_q(x)`, by bilateral sum or triple product.
///
/// The two modes agree to working precision; the product form vanishes
/// exactly on the zero lattice `x in -q^Z` because the vanishing
/// Pochhammer factor is hit exactly.
pub fn theta<T: Scalar>(x: C<T>, mode: ThetaMode, ctx: &QContext<T>) -> Result<C<T>> {
    if x.is_zero() {
        return Err(QError::Domain("theta argument must be nonzero".into()));
    }
    match mode {
        ThetaMode::Sum => sum_bilateral("theta", ctx, |n| {
            Ok(x.powi(n as i32) * ctx.q().powi(half_pochhammer_exponent(n)?))
        }),
        ThetaMode::Product => {
            let a = qpoch_inf(ctx.q(), ctx)?;
            let b = qpoch_inf(-x, ctx)?;
            let c = qpoch_inf(-ctx.q() / x, ctx)?;
            let value = a * b * c;
            if !finite(value) {
                return Err(QError::NonFinite("theta product".into()));
            }
            Ok(value)
        }
    }
}

/// `theta_q(x)` in product mode, erroring with [`QError::Pole`] when the
/// value sits within the pole guard of the zero lattice.
///
/// This is the form used whenever a theta function lands in a denominator.
pub(crate) fn theta_denominator<T: Scalar>(x: C<T>, ctx: &QContext<T>) -> Result<C<T>> {
    if x.is_zero() {
        return Err(QError::Domain("theta argument must be nonzero".into()));
    }
    let (a, ra) = qpoch_inf_scaled(ctx.q(), ctx)?;
    let (b, rb) = qpoch_inf_scaled(-x, ctx)?;
    let (c, rc) = qpoch_inf_scaled(-ctx.q() / x, ctx)?;
    let min_rel = ra.min(rb).min(rc);
    if min_rel < crate::scalar::real(POLE_GUARD) {
        return Err(QError::pole(
            "theta denominator",
            format!("argument within {min_rel:e} of the zero lattice -q^Z"),
        ));
    }
    let value = a * b * c;
    if !finite(value) {
        return Err(QError::NonFinite("theta denominator".into()));
    }
    Ok(value)
}

/// Basic hypergeometric series `r_phi_s(upper; lower; q; z)`.
///
/// Convergent regimes only: `s - r + 1 > 0` converges everywhere,
/// `r = s + 1` needs `|z| < 1`, and `s - r + 1 < 0` is rejected as
/// [`QError::Divergent`] (use [`qhyper_coeffs`] to work with such a series
/// formally).
pub fn qhyper<T: Scalar>(
    upper: &[C<T>],
    lower: &[C<T>],
    z: C<T>,
    ctx: &QContext<T>,
) -> Result<C<T>> {
    let balance = lower.len() as i32 - upper.len() as i32 + 1;
    if balance < 0 {
        return Err(QError::Divergent(format!(
            "{}_phi_{} has balancing exponent {balance}; summing it numerically is not defined",
            upper.len(),
            lower.len(),
        )));
    }
    if balance == 0 && z.norm() >= T::one() {
        return Err(QError::Divergent(format!(
            "{}_phi_{} converges only for |z| < 1, got |z| = {}",
            upper.len(),
            lower.len(),
            z.norm(),
        )));
    }

    let one: C<T> = Complex::one();
    let mut total = one;
    let mut term = one;
    let mut qn = one;
    let mut streak = 0u32;
    for _ in 0..ctx.max_terms() {
        let mut ratio = z;
        for &a in upper {
            ratio = ratio * (one - a * qn);
        }
        for &b in lower {
            let factor = one - b * qn;
            let rel = factor.norm() / (T::one() + (b * qn).norm());
            if rel < crate::scalar::real(POLE_GUARD) {
                return Err(QError::pole(
                    "qhyper",
                    "lower parameter within guard of q^{-N}".to_string(),
                ));
            }
            ratio = ratio / factor;
        }
        ratio = ratio / (one - ctx.q() * qn);
        if balance > 0 {
            ratio = ratio * (-qn).powi(balance);
        }
        term = term * ratio;
        total = total + term;
        if term.norm() <= ctx.tol() * (T::one() + total.norm()) {
            streak += 1;
            if streak >= STREAK {
                if !finite(total) {
                    return Err(QError::NonFinite("qhyper".into()));
                }
                return Ok(total);
            }
        } else {
            streak = 0;
        }
        qn = qn * ctx.q();
    }
    Err(QError::truncation("qhyper", ctx.max_terms()))
}

/// First `n_coeffs + 1` coefficients `A_0..A_N` of `r_phi_s` as a series in
/// `z`, divergent parameter counts included.
///
/// This is the formal companion of [`qhyper`]: the coefficient recurrence
/// is evaluated without any convergence requirement, so series with
/// negative balancing exponent (which only exist as formal objects) can be
/// fed to the q-Borel transform.
pub fn qhyper_coeffs<T: Scalar>(
    upper: &[C<T>],
    lower: &[C<T>],
    n_coeffs: usize,
    ctx: &QContext<T>,
) -> Result<Vec<C<T>>> {
    let balance = lower.len() as i32 - upper.len() as i32 + 1;
    let one: C<T> = Complex::one();
    let mut coeffs = Vec::with_capacity(n_coeffs + 1);
    let mut coeff = one;
    coeffs.push(coeff);
    let mut qn = one;
    for _ in 0..n_coeffs {
        let mut ratio = one;
        for &a in upper {
            ratio = ratio * (one - a * qn);
        }
        for &b in lower {
            let factor = one - b * qn;
            let rel = factor.norm() / (T::one() + (b * qn).norm());
            if rel < crate::scalar::real(POLE_GUARD) {
                return Err(QError::pole(
                    "qhyper_coeffs",
                    "lower parameter within guard of q^{-N}".to_string(),
                ));
            }
            ratio = ratio / factor;
        }
        ratio = ratio / (one - ctx.q() * qn);
        if balance != 0 {
            ratio = ratio * (-qn).powi(balance);
        }
        coeff = coeff * ratio;
        if !finite(coeff) {
            return Err(QError::NonFinite("qhyper_coeffs".into()));
        }
        coeffs.push(coeff);
        qn = qn * ctx.q();
    }
    Ok(coeffs)
}

/// Exponent `n(n-1)/2` as an `i32` suitable for `powi`.
pub(crate) fn half_pochhammer_exponent(n: i64) -> Result<i32> {
    let e = n
        .checked_mul(n - 1)
        .map(|p| p / 2)
        .ok_or_else(|| QError::Domain("theta exponent overflow".into()))?;
    i32::try_from(e).map_err(|_| QError::Domain("theta exponent overflow".into()))
}

/// Exponent `n(n+1)/2` as an `i32` suitable for `powi`.
pub(crate) fn half_triangular_exponent(n: i64) -> Result<i32> {
    let e = n
        .checked_mul(n + 1)
        .map(|p| p / 2)
        .ok_or_else(|| QError::Domain("series exponent overflow".into()))?;
    i32::try_from(e).map_err(|_| QError::Domain("series exponent overflow".into()))
}

/// Adaptive bilateral summation `sum_{n in Z} term(n)`.
///
/// Starts at `n = 0`, then walks each direction separately; a direction
/// stops once three consecutive terms fall below `tol` relative to the
/// accumulated total. Summation order is fixed, so results are
/// bit-reproducible.
pub(crate) fn sum_bilateral<T: Scalar, F>(what: &str, ctx: &QContext<T>, term: F) -> Result<C<T>>
where
    F: Fn(i64) -> Result<C<T>>,
{
    let mut total = term(0)?;
    for dir in [1i64, -1] {
        let mut streak = 0u32;
        let mut converged = false;
        for k in 1..=ctx.max_terms() {
            let t = term(dir * k as i64)?;
            total = total + t;
            if t.norm() <= ctx.tol() * (T::one() + total.norm()) {
                streak += 1;
                if streak >= STREAK {
                    converged = true;
                    break;
                }
            } else {
                streak = 0;
            }
        }
        if !converged {
            return Err(QError::truncation(what, ctx.max_terms()));
        }
    }
    if !finite(total) {
        return Err(QError::NonFinite(what.into()));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;
    use crate::testbrute;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn ctx(q: f64) -> QContext<f64> {
        QContext::real_nome(q).unwrap()
    }

    fn rel(a: C<f64>, b: C<f64>) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn qpoch_finite_hand_values() {
        let c = ctx(0.5);
        assert_eq!(qpoch_finite(cx(0.7, 0.0), 0, &c), cx(1.0, 0.0));
        // (1/2; 1/2)_2 = (1 - 1/2)(1 - 1/4) = 3/8
        let p = qpoch_finite(cx(0.5, 0.0), 2, &c);
        assert_relative_eq!(p.re, 0.375, max_relative = 1e-15);
        assert_eq!(p.im, 0.0);
    }

    #[test]
    fn qpoch_inf_at_zero_is_one() {
        let c = ctx(0.3);
        assert_eq!(qpoch_inf(cx(0.0, 0.0), &c).unwrap(), cx(1.0, 0.0));
    }

    #[test]
    fn qpoch_inf_tiny_argument_tiny_nome() {
        let c = ctx(1e-12);
        let p = qpoch_inf(cx(1e-12, 0.0), &c).unwrap();
        assert!((p.re - (1.0 - 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn qpoch_inf_matches_brute_force_product() {
        let c = ctx(0.5);
        let brute = testbrute::qpoch_brute(cx(0.5, 0.0), 0.5, 200);
        let adaptive = qpoch_inf(cx(0.5, 0.0), &c).unwrap();
        assert!(rel(adaptive, brute) < 1e-14);

        let c = ctx(0.31);
        let x = cx(0.4, -0.2);
        let brute = testbrute::qpoch_brute(x, 0.31, 200);
        assert!(rel(qpoch_inf(x, &c).unwrap(), brute) < 1e-14);
    }

    #[test]
    fn qpoch_nu_zero_order_is_exactly_one() {
        let c = ctx(0.4);
        assert_eq!(
            qpoch_nu(cx(0.3, 0.1), cx(0.0, 0.0), &c).unwrap(),
            cx(1.0, 0.0)
        );
    }

    #[test]
    fn qpoch_nu_integer_order_matches_finite() {
        let c = ctx(0.35);
        let x = cx(0.6, 0.0);
        let via_nu = qpoch_nu(x, cx(2.0, 0.0), &c).unwrap();
        let finite = qpoch_finite(x, 2, &c);
        assert!(rel(via_nu, finite) < 1e-12);
    }

    #[test]
    fn qpoch_nu_stable_under_doubled_budget() {
        let c = ctx(0.45);
        let x = cx(0.52, 0.0);
        let nu = cx(0.5, 0.0);
        let v1 = qpoch_nu(x, nu, &c).unwrap();
        let v2 = qpoch_nu(x, nu, &c.with_max_terms(c.max_terms() * 2).unwrap()).unwrap();
        assert!(rel(v1, v2) < 1e-12);
    }

    #[test]
    fn theta_rejects_zero_argument() {
        let c = ctx(0.3);
        assert!(matches!(
            theta(cx(0.0, 0.0), ThetaMode::Sum, &c),
            Err(QError::Domain(_))
        ));
    }

    #[test]
    fn theta_product_vanishes_on_zero_lattice() {
        let c = ctx(0.3);
        // theta_q(-1): the factor (1 - 1) appears exactly in (-x; q)_oo.
        let v = theta(cx(-1.0, 0.0), ThetaMode::Product, &c).unwrap();
        assert_eq!(v, cx(0.0, 0.0));
        // theta_q(-q^2) vanishes through the (-q/x; q)_oo factor.
        let v = theta(cx(-0.09, 0.0), ThetaMode::Product, &c).unwrap();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn theta_sum_matches_brute_force() {
        let c = ctx(0.2);
        let x = cx(0.3, 0.0);
        let brute = testbrute::theta_brute(x, 0.2, 60);
        assert!(rel(theta(x, ThetaMode::Sum, &c).unwrap(), brute) < 1e-14);
    }

    #[test]
    fn theta_sum_and_product_agree() {
        for (q, xre, xim) in [(0.2, 0.3, 0.0), (0.45, 0.8, 0.0), (0.3, 0.4, 0.3)] {
            let c = ctx(q);
            let x = cx(xre, xim);
            let s = theta(x, ThetaMode::Sum, &c).unwrap();
            let p = theta(x, ThetaMode::Product, &c).unwrap();
            assert!(rel(s, p) < 1e-12, "q={q} x={x}: {s} vs {p}");
        }
    }

    #[test]
    fn theta_shift_by_three() {
        // x^n q^{n(n-1)/2} theta_q(x q^n) = theta_q(x) at n = 3.
        let c = ctx(0.3);
        let x = cx(0.7, 0.0);
        let n = 3i32;
        let shifted = theta(x * c.q().powi(n), ThetaMode::Sum, &c).unwrap();
        let lhs = x.powi(n) * c.q().powi(n * (n - 1) / 2) * shifted;
        let rhs = theta(x, ThetaMode::Sum, &c).unwrap();
        assert!(rel(lhs, rhs) < 1e-13);
    }

    #[test]
    fn theta_denominator_guards_near_lattice() {
        let c = ctx(0.3);
        // x = -q^2 (1 + 1e-10) sits inside the guard zone of the lattice -q^Z.
        let x = cx(-0.09 * (1.0 + 1e-10), 0.0);
        assert!(matches!(
            theta_denominator(x, &c),
            Err(QError::Pole { .. })
        ));
        // A generic argument passes and agrees with the plain product.
        let x = cx(0.4, 0.0);
        let guarded = theta_denominator(x, &c).unwrap();
        let plain = theta(x, ThetaMode::Product, &c).unwrap();
        assert_eq!(guarded, plain);
    }

    #[test]
    fn qhyper_geometric_series() {
        // 1_phi_0(q; -; q; z): the (q; q)_n cancel, leaving sum z^n = 1/(1-z).
        let c = ctx(0.25);
        let v = qhyper(&[c.q()], &[], cx(0.3, 0.0), &c).unwrap();
        assert!(rel(v, cx(1.0 / 0.7, 0.0)) < 1e-13);
    }

    #[test]
    fn qhyper_matches_brute_force_2phi1() {
        let q = 0.25;
        let c = ctx(q);
        let (a, b, bb, z) = (0.3, 0.1, 0.2, 0.4);
        let brute = testbrute::qhyper_2phi1_brute(a, b, bb, q, z, 60);
        let v = qhyper(
            &[cx(a, 0.0), cx(b, 0.0)],
            &[cx(bb, 0.0)],
            cx(z, 0.0),
            &c,
        )
        .unwrap();
        assert!(rel(v, brute) < 1e-12);
    }

    #[test]
    fn qhyper_rejects_divergent_requests() {
        let c = ctx(0.3);
        // 2_phi_0 has balancing exponent -1: formal only.
        assert!(matches!(
            qhyper(&[c.q(), cx(0.0, 0.0)], &[], cx(0.1, 0.0), &c),
            Err(QError::Divergent(_))
        ));
        // r = s + 1 outside the unit disk.
        assert!(matches!(
            qhyper(&[cx(0.3, 0.0), cx(0.2, 0.0)], &[cx(0.4, 0.0)], cx(1.5, 0.0), &c),
            Err(QError::Divergent(_))
        ));
    }

    #[test]
    fn qhyper_coeffs_of_divergent_series() {
        // 2_phi_0(q, 0; -; q; z) has A_n = (-1)^n q^{-n(n-1)/2}:
        // the (q; q)_n cancel and the balancing factor inverts.
        let q = 0.3;
        let c = ctx(q);
        let coeffs = qhyper_coeffs(&[c.q(), cx(0.0, 0.0)], &[], 5, &c).unwrap();
        for (n, got) in coeffs.iter().enumerate() {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let expect = cx(sign * q.powf(-(n as f64) * ((n as f64) - 1.0) / 2.0), 0.0);
            assert!(rel(*got, expect) < 1e-13, "n={n}: {got} vs {expect}");
        }
    }

    #[test]
    fn qhyper_coeffs_match_convergent_sum() {
        let q = 0.25;
        let c = ctx(q);
        let upper = [cx(0.3, 0.0), cx(0.1, 0.0)];
        let lower = [cx(0.2, 0.0)];
        let z = cx(0.4, 0.0);
        let coeffs = qhyper_coeffs(&upper, &lower, 60, &c).unwrap();
        let mut acc = cx(0.0, 0.0);
        let mut zn = cx(1.0, 0.0);
        for a in &coeffs {
            acc += a * zn;
            zn *= z;
        }
        let direct = qhyper(&upper, &lower, z, &c).unwrap();
        assert!(rel(acc, direct) < 1e-13);
    }

    #[test]
    fn bilateral_sum_reports_truncation() {
        let c = ctx(0.3).with_max_terms(8).unwrap();
        // Terms of constant magnitude never satisfy the tail rule.
        let r = sum_bilateral("stub", &c, |_| Ok(cx(1.0, 0.0)));
        assert!(matches!(r, Err(QError::Truncation { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prop_theta_shift_identity(
            q in 0.05f64..0.5,
            u in 0.1f64..0.9,
            n in -3i32..=3,
        ) {
            let c = ctx(q);
            let x = cx(q.powf(u), 0.0);
            let shifted = theta(x * c.q().powi(n), ThetaMode::Sum, &c).unwrap();
            let lhs = x.powi(n) * c.q().powi(n * (n - 1) / 2) * shifted;
            let rhs = theta(x, ThetaMode::Sum, &c).unwrap();
            prop_assert!(rel(lhs, rhs) < 1e-11);
        }

        #[test]
        fn prop_theta_sum_equals_product(
            q in 0.05f64..0.5,
            u in 0.1f64..0.9,
        ) {
            let c = ctx(q);
            let x = cx(q.powf(u), 0.0);
            let s = theta(x, ThetaMode::Sum, &c).unwrap();
            let p = theta(x, ThetaMode::Product, &c).unwrap();
            prop_assert!(rel(s, p) < 1e-12);
        }

        #[test]
        fn prop_qpoch_inf_deterministic(
            q in 0.05f64..0.5,
            u in 0.1f64..0.9,
        ) {
            let c = ctx(q);
            let x = cx(q.powf(u), 0.0);
            let a = qpoch_inf(x, &c).unwrap();
            let b = qpoch_inf(x, &c).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
