//! q-Borel and q-Laplace transforms, formal and convergent solutions of
//! the order-m equation built by `op_diver`, and the machinery connecting
//! them.
//!
//! Transforms, acting on `f(x) = sum_{n>=0} A_n x^n`:
//!
//! ```text
//! B^+-(f)(xi)    = sum_n A_n q^{+-n(n-1)/2} xi^n
//! L^+(f)(x, l)   = sum_{n in Z} f(l q^n) / theta_q(x^{-1} l q^n)
//! L^-(f)(x)      = (1/2 pi i) \oint_{|xi|=r} f(xi) theta_q(x/xi) dxi/xi
//! ```
//!
//! `L^-` carries the `1/(2 pi i)` normalization throughout, which makes
//! the monomial rule `L^-(xi^k) = x^k q^{k(k-1)/2}` hold on the nose.
//!
//! The contour integral is a periodic trapezoid rule: spectrally accurate
//! on a circle avoiding the integrand's poles, with the node count doubled
//! from `ctx.contour_points()` until the value stabilizes (capped at
//! 2^14). Node values are combined by pairwise summation so the result
//! does not depend on evaluation order.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::context::{QContext, MAX_CONTOUR_POINTS};
use crate::error::{QError, Result};
use crate::operator::QDiffOperator;
use crate::qseries::{qhyper_coeffs, qpoch_inf, sum_bilateral, theta, theta_denominator, ThetaMode};
use crate::scalar::{cpow, finite, real, Scalar, C};

/// Where a series lives: around the origin (powers of `x`) or around
/// infinity (powers of `1/x`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionPoint {
    Zero,
    Infinity,
}

/// Sign of a q-Borel transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BorelSign {
    Plus,
    Minus,
}

/// Truncated series `x^alpha sum_{n=0}^{N} A_n u^n`, where `u = x` around
/// zero and `u = 1/x` around infinity. The truncation order is part of the
/// value: trailing zeros are meaningful.
#[derive(Debug, Clone, PartialEq)]
pub struct PuiseuxSeries<T: Scalar> {
    pub point: ExpansionPoint,
    pub prefactor_exponent: C<T>,
    pub coeffs: Vec<C<T>>,
}

impl<T: Scalar> PuiseuxSeries<T> {
    /// Plain power series around zero (prefactor exponent 0).
    pub fn plain(coeffs: Vec<C<T>>) -> Self {
        Self {
            point: ExpansionPoint::Zero,
            prefactor_exponent: Complex::zero(),
            coeffs,
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

/// q-Borel transform: multiplies `A_n` by `q^{+-n(n-1)/2}`.
///
/// Defined on plain power series around zero only; a prefactored or
/// infinity-based series is a domain error.
pub fn borel<T: Scalar>(
    series: &PuiseuxSeries<T>,
    sign: BorelSign,
    ctx: &QContext<T>,
) -> Result<PuiseuxSeries<T>> {
    if series.point != ExpansionPoint::Zero || !series.prefactor_exponent.is_zero() {
        return Err(QError::Domain(
            "q-Borel transform acts on plain power series around zero".into(),
        ));
    }
    let q = ctx.q();
    let coeffs = series
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, &a)| {
            let e = (n as i32) * (n as i32 - 1) / 2;
            let e = match sign {
                BorelSign::Plus => e,
                BorelSign::Minus => -e,
            };
            a * q.powi(e)
        })
        .collect();
    Ok(PuiseuxSeries::plain(coeffs))
}

/// q-Laplace transform `L^+`: bilateral sum over the grid `lambda q^Z`.
///
/// Converges when `f` grows at most like a power along the grid; the theta
/// denominators supply super-geometric decay in both tails.
pub fn laplace_plus<T: Scalar>(
    f: impl Fn(C<T>) -> Result<C<T>>,
    x: C<T>,
    lambda: C<T>,
    ctx: &QContext<T>,
) -> Result<C<T>> {
    if x.is_zero() || lambda.is_zero() {
        return Err(QError::Domain("laplace_plus requires nonzero x, lambda".into()));
    }
    let q = ctx.q();
    sum_bilateral("laplace_plus", ctx, |n| {
        let grid = lambda * q.powi(n as i32);
        Ok(f(grid)? / theta_denominator(grid / x, ctx)?)
    })
}

/// q-Laplace transform `L^-`: normalized contour integral
/// `(1/2 pi i) \oint f(xi) theta_q(x/xi) dxi/xi` over `|xi| = r`.
///
/// The radius is `ctx.contour_radius()` when set, else `sqrt(|q|)`. The
/// caller must keep the poles of `f` away from the circle; a pole on the
/// contour shows up as a node-doubling failure (`TruncationError`).
pub fn laplace_minus<T: Scalar>(
    f: impl Fn(C<T>) -> Result<C<T>>,
    x: C<T>,
    ctx: &QContext<T>,
) -> Result<C<T>> {
    let r = ctx
        .contour_radius()
        .unwrap_or_else(|| ctx.q().norm().sqrt());
    laplace_minus_at(&f, x, r, ctx)
}

fn laplace_minus_at<T: Scalar>(
    f: &impl Fn(C<T>) -> Result<C<T>>,
    x: C<T>,
    r: T,
    ctx: &QContext<T>,
) -> Result<C<T>> {
    let mut n_nodes = ctx.contour_points();
    let mut prev: Option<C<T>> = None;
    while n_nodes <= MAX_CONTOUR_POINTS {
        let (val, scale) = contour_average(f, x, r, n_nodes, ctx)?;
        if let Some(p) = prev {
            // The trapezoid sum cannot resolve the average below the roundoff
            // floor of its largest node term, so when the integrand dwarfs the
            // integral (a contour forced far from |x| makes the theta factor
            // peak) treat agreement at that floor as converged.
            if (val - p).norm() <= ctx.tol() * (T::one() + val.norm() + scale) {
                if !finite(val) {
                    return Err(QError::NonFinite("laplace_minus".into()));
                }
                return Ok(val);
            }
        }
        prev = Some(val);
        n_nodes *= 2;
    }
    Err(QError::truncation("laplace_minus nodes", MAX_CONTOUR_POINTS))
}

/// One periodic-trapezoid pass: `(1/N) sum_j f(xi_j) theta_q(x / xi_j)`
/// over `N` equispaced nodes, pairwise-summed.
fn contour_average<T: Scalar>(
    f: &impl Fn(C<T>) -> Result<C<T>>,
    x: C<T>,
    r: T,
    n_nodes: usize,
    ctx: &QContext<T>,
) -> Result<(C<T>, T)> {
    let mut vals = Vec::with_capacity(n_nodes);
    let mut scale = T::zero();
    for j in 0..n_nodes {
        let phi = real::<T>(2.0 * std::f64::consts::PI * j as f64 / n_nodes as f64);
        let xi = Complex::from_polar(r, phi);
        let term = f(xi)? * theta(x / xi, ThetaMode::Sum, ctx)?;
        scale = scale.max(term.norm());
        vals.push(term);
    }
    Ok((pairwise_sum(vals) / real::<T>(n_nodes as f64), scale))
}

fn pairwise_sum<T: Scalar>(mut terms: Vec<C<T>>) -> C<T> {
    if terms.is_empty() {
        return Complex::zero();
    }
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len() / 2 + 1);
        for pair in terms.chunks(2) {
            next.push(if pair.len() == 2 {
                pair[0] + pair[1]
            } else {
                pair[0]
            });
        }
        terms = next;
    }
    terms[0]
}

/// Coefficient-wise residual of the Borel commutation rule
/// `B^+-(x^m T^n f) = q^{+-m(m-1)/2} xi^m T^{n +- m} B^+-(f)`, maximum
/// over both signs. Each coefficient discrepancy is measured relative to
/// the coefficient's magnitude, since `B^-` coefficients grow like
/// `q^{-n^2/2}`.
pub fn commutation_check<T: Scalar>(
    m: u32,
    n: i32,
    series: &PuiseuxSeries<T>,
    ctx: &QContext<T>,
) -> T {
    let q = ctx.q();
    let a = &series.coeffs;
    let len = a.len() + m as usize;
    let mut worst = T::zero();
    for sign in [1i32, -1] {
        for j in 0..len {
            // Left side: B^sign of x^m T^n f, whose x^j coefficient is
            // A_{j-m} q^{n (j-m)}.
            let lhs = if j >= m as usize {
                let k = j - m as usize;
                a[k] * q.powi(n * k as i32) * q.powi(sign * tri(j))
            } else {
                Complex::zero()
            };
            // Right side: q^{sign m(m-1)/2} xi^m T^{n + sign m} B^sign(f).
            let rhs = if j >= m as usize {
                let k = j - m as usize;
                a[k] * q.powi(sign * tri(k))
                    * q.powi((n + sign * m as i32) * k as i32)
                    * q.powi(sign * tri(m as usize))
            } else {
                Complex::zero()
            };
            let d = (lhs - rhs).norm() / (T::one() + lhs.norm().max(rhs.norm()));
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

fn tri(n: usize) -> i32 {
    let n = n as i32;
    n * (n - 1) / 2
}

/// Formal series solution of `op_diver(alpha_list, beta_list)` around zero
/// or infinity.
///
/// Around zero the `j`-th solution (`1 <= j <= m-1`, with
/// `m = alpha_list.len() + 1`) is
///
/// ```text
/// x^{alpha_j} mphi_{m-2}(q^{alpha_j - beta_1..}, 0;
///                        q^{alpha_j - alpha_k + 1}, k != j;
///                        q; (b1/a1) q^{-alpha_j - 1} x)
/// ```
///
/// and around infinity the series runs in `1/x` with prefactor
/// `x^{beta_j}` and argument scale `q^{m - 1 + beta_j}`. The returned
/// coefficients absorb the argument scale, so they are plain coefficients
/// of `x^n` (resp. `x^{-n}`).
///
/// These series have Borel level one (they diverge everywhere); they exist
/// as coefficient lists only. A lower parameter within the pole guard of
/// `q^{-N}` is reported as `ResonanceError`.
pub fn formal_solution<T: Scalar>(
    point: ExpansionPoint,
    j: usize,
    alpha_list: &[C<T>],
    beta_list: &[C<T>],
    n_terms: usize,
    ctx: &QContext<T>,
) -> Result<PuiseuxSeries<T>> {
    if alpha_list.len() != beta_list.len() || alpha_list.is_empty() {
        return Err(QError::Domain(
            "exponent lists must be nonempty and of equal length".into(),
        ));
    }
    let m = alpha_list.len() + 1;
    if j < 1 || j > m - 1 {
        return Err(QError::Domain(format!(
            "solution index must satisfy 1 <= j <= {}, got {j}",
            m - 1
        )));
    }
    let q = ctx.q();
    let one: C<T> = Complex::one();

    let (exponent, upper, lower, scale) = match point {
        ExpansionPoint::Zero => {
            let aj = alpha_list[j - 1];
            let mut upper: Vec<C<T>> =
                beta_list.iter().map(|&b| cpow(q, aj - b)).collect();
            upper.push(Complex::zero());
            let lower: Vec<C<T>> = alpha_list
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j - 1)
                .map(|(_, &a)| cpow(q, aj - a + one))
                .collect();
            let sum_diff = beta_list
                .iter()
                .zip(alpha_list)
                .fold(C::<T>::zero(), |acc, (&b, &a)| acc + b - a);
            let scale = cpow(q, sum_diff - aj - one);
            (aj, upper, lower, scale)
        }
        ExpansionPoint::Infinity => {
            let bj = beta_list[j - 1];
            let mut upper: Vec<C<T>> =
                alpha_list.iter().map(|&a| cpow(q, a - bj)).collect();
            upper.push(Complex::zero());
            let lower: Vec<C<T>> = beta_list
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j - 1)
                .map(|(_, &b)| cpow(q, b - bj + one))
                .collect();
            let scale = cpow(q, Complex::from(real::<T>((m - 1) as f64)) + bj);
            (bj, upper, lower, scale)
        }
    };

    let raw = qhyper_coeffs(&upper, &lower, n_terms, ctx).map_err(|e| match e {
        QError::Pole { .. } => QError::Resonance(
            "a lower series parameter sits within the pole guard of q^-N".into(),
        ),
        other => other,
    })?;
    let coeffs = raw
        .into_iter()
        .enumerate()
        .map(|(n, a)| a * scale.powi(n as i32))
        .collect();
    Ok(PuiseuxSeries {
        point,
        prefactor_exponent: exponent,
        coeffs,
    })
}

/// Applies a q-difference operator to a truncated series, dropping the
/// trailing coefficients that would need input terms beyond the
/// truncation order. The valid order shrinks by the operator's maximal
/// x-degree.
pub fn apply_operator_to_series<T: Scalar>(
    op: &QDiffOperator<T>,
    s: &PuiseuxSeries<T>,
) -> PuiseuxSeries<T> {
    let (values, _) = apply_with_scale(op, s);
    PuiseuxSeries {
        point: s.point,
        prefactor_exponent: s.prefactor_exponent,
        coeffs: values,
    }
}

/// Maximal coefficient-wise cancellation residual of `op` applied to `s`:
/// for each computable output order, `|sum of contributions| / sum of
/// |contributions|`. Near zero exactly when the operator annihilates the
/// series through the valid truncation window.
pub fn annihilation_residual<T: Scalar>(op: &QDiffOperator<T>, s: &PuiseuxSeries<T>) -> T {
    let (values, scales) = apply_with_scale(op, s);
    values
        .iter()
        .zip(&scales)
        .map(|(v, &sc)| {
            if sc.is_zero() {
                T::zero()
            } else {
                v.norm() / sc
            }
        })
        .fold(T::zero(), |a, b| if b > a { b } else { a })
}

fn apply_with_scale<T: Scalar>(
    op: &QDiffOperator<T>,
    s: &PuiseuxSeries<T>,
) -> (Vec<C<T>>, Vec<T>) {
    let q = op.base();
    let rho = s.prefactor_exponent;
    let n_in = s.coeffs.len() as i64;
    let max_degree = op
        .terms()
        .filter_map(|(_, c)| c.max_degree())
        .max()
        .unwrap_or(0)
        .max(0);
    let n_out = n_in - max_degree;
    if n_out <= 0 {
        return (Vec::new(), Vec::new());
    }
    let mut values = vec![C::<T>::zero(); n_out as usize];
    let mut scales = vec![T::zero(); n_out as usize];
    for (l, poly) in op.terms() {
        let shift_pref = cpow(q, rho * real::<T>(l as f64));
        for (p, coeff) in poly.iter() {
            for k in 0..n_in {
                let out = match s.point {
                    ExpansionPoint::Zero => k + p,
                    ExpansionPoint::Infinity => k - p,
                };
                if out < 0 || out >= n_out {
                    continue;
                }
                let grid = match s.point {
                    ExpansionPoint::Zero => q.powi((l as i64 * k) as i32),
                    ExpansionPoint::Infinity => q.powi(-((l as i64 * k) as i32)),
                };
                let term = coeff * shift_pref * grid * s.coeffs[k as usize];
                values[out as usize] = values[out as usize] + term;
                scales[out as usize] = scales[out as usize] + term.norm();
            }
        }
    }
    (values, scales)
}

/// Convergent contour-integral solution of `op_diver(alpha_list,
/// beta_list)` around zero or infinity:
///
/// ```text
/// zero:     [1/theta_q(-c x)] L^-(g),
///           c = q^{sum beta - sum alpha},
///           g(xi) = prod_k (-c xi q^{1-alpha_k}; q)_oo / (-c xi q^{-beta_k}; q)_oo
/// infinity: [1/theta_q(-x q^{-(m-1)})] L^-(g),
///           g(xi) = prod_k (-q^{m+beta_k}/xi; q)_oo / (-q^{m-1+alpha_k}/xi; q)_oo
/// ```
///
/// The infinity-point exponents are fixed by the two-term cancellation
/// `P_a(C xi) g(xi) = -(q/C) P_b(C xi / q) g(xi/q)` with `C = -q^{-(m-1)}`;
/// they also make `beta_k = alpha_k - 1` telescope to the same
/// `1/theta_q(-x q^{-(m-1)})` as the zero-point solution.
///
/// The contour radius defaults to `|x|` clamped into the pole-free
/// annulus, whose edge is the pole lattice scaled by `sqrt(|q|)` (inward
/// around zero, outward around infinity); a caller radius from `ctx` is
/// validated to clear the poles by at least 2%.
pub fn integral_solution<T: Scalar>(
    point: ExpansionPoint,
    alpha_list: &[C<T>],
    beta_list: &[C<T>],
    x: C<T>,
    ctx: &QContext<T>,
) -> Result<C<T>> {
    if alpha_list.len() != beta_list.len() || alpha_list.is_empty() {
        return Err(QError::Domain(
            "exponent lists must be nonempty and of equal length".into(),
        ));
    }
    let m = alpha_list.len() + 1;
    let q = ctx.q();
    let one: C<T> = Complex::one();
    let sqrt_q = q.norm().sqrt();
    let margin = real::<T>(0.02);

    match point {
        ExpansionPoint::Zero => {
            let sum_diff = beta_list
                .iter()
                .zip(alpha_list)
                .fold(C::<T>::zero(), |acc, (&b, &a)| acc + b - a);
            let c = cpow(q, sum_diff);
            let rho_out = beta_list
                .iter()
                .map(|&b| (cpow(q, b) / c).norm())
                .fold(T::infinity(), |a, b| if b < a { b } else { a });
            let r = match ctx.contour_radius() {
                Some(r) => {
                    if r > rho_out * (T::one() - margin) {
                        return Err(QError::pole(
                            "integral_solution contour",
                            format!(
                                "radius {r} does not clear the pole circle at {rho_out}"
                            ),
                        ));
                    }
                    r
                }
                // Track |x| while staying inside the pole-free disc: the
                // integral is radius-independent there, and keeping the
                // circle near |x| keeps the theta factor O(1) so the
                // quadrature does not lose digits to cancellation.
                None => {
                    let cap = rho_out * sqrt_q;
                    let rx = x.norm();
                    if rx < cap && rx > T::zero() {
                        rx
                    } else {
                        cap
                    }
                }
            };
            let g = |xi: C<T>| -> Result<C<T>> {
                let mut val = one;
                for (&a, &b) in alpha_list.iter().zip(beta_list) {
                    let num = qpoch_inf(-c * xi * cpow(q, one - a), ctx)?;
                    let den = qpoch_inf(-c * xi * cpow(q, -b), ctx)?;
                    val = val * num / den;
                }
                Ok(val)
            };
            let pref = theta_denominator(-c * x, ctx)?;
            Ok(laplace_minus_at(&g, x, r, ctx)? / pref)
        }
        ExpansionPoint::Infinity => {
            let m_c = Complex::from(real::<T>(m as f64));
            let m1_c = Complex::from(real::<T>((m - 1) as f64));
            let rho_in = alpha_list
                .iter()
                .map(|&a| cpow(q, m1_c + a).norm())
                .fold(T::zero(), |acc, b| if b > acc { b } else { acc });
            let r = match ctx.contour_radius() {
                Some(r) => {
                    if r < rho_in * (T::one() + margin) {
                        return Err(QError::pole(
                            "integral_solution contour",
                            format!(
                                "radius {r} does not clear the pole circle at {rho_in}"
                            ),
                        ));
                    }
                    r
                }
                // Same |x|-tracking as the zero point, bounded below by
                // the outermost pole circle.
                None => {
                    let floor = rho_in / sqrt_q;
                    let rx = x.norm();
                    if rx > floor {
                        rx
                    } else {
                        floor
                    }
                }
            };
            let g = |xi: C<T>| -> Result<C<T>> {
                let mut val = one;
                for (&a, &b) in alpha_list.iter().zip(beta_list) {
                    let num = qpoch_inf(-cpow(q, m_c + b) / xi, ctx)?;
                    let den = qpoch_inf(-cpow(q, m1_c + a) / xi, ctx)?;
                    val = val * num / den;
                }
                Ok(val)
            };
            let pref = theta_denominator(-x * q.powi(-(m as i32 - 1)), ctx)?;
            Ok(laplace_minus_at(&g, x, r, ctx)? / pref)
        }
    }
}
