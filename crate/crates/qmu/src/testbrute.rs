//! Brute-force reference evaluations for tests.
//!
//! Everything here is a raw loop with a fixed, generous term count and no
//! adaptive logic, so a bug in the truncation machinery cannot hide in
//! both sides of a comparison. Test-only, f64 only.

use num_complex::Complex64;

/// `(x; q)_oo` as a plain product of `n_factors` factors.
pub fn qpoch_brute(x: Complex64, q: f64, n_factors: u32) -> Complex64 {
    let mut p = Complex64::new(1.0, 0.0);
    let mut xqj = x;
    for _ in 0..n_factors {
        p *= Complex64::new(1.0, 0.0) - xqj;
        xqj *= q;
    }
    p
}

/// `theta_q(x)` as the raw bilateral sum over `-n_terms..=n_terms`.
///
/// Terms are built multiplicatively from their neighbors so the far tails
/// underflow to zero instead of producing `inf * 0 = NaN` the way separate
/// `x^n` and `q^{n(n-1)/2}` powers would.
pub fn theta_brute(x: Complex64, q: f64, n_terms: i64) -> Complex64 {
    let mut s = Complex64::new(1.0, 0.0);
    let mut t = Complex64::new(1.0, 0.0);
    for n in 0..n_terms {
        // term(n+1) = term(n) * x * q^n
        t *= x * q.powi(n as i32);
        s += t;
    }
    t = Complex64::new(1.0, 0.0);
    for n in (-n_terms..0).rev() {
        // term(n) = term(n+1) / (x * q^n)
        t /= x * q.powi(n as i32);
        s += t;
    }
    s
}

/// `2_phi_1(a, b; c; q; z)` as a raw loop of `n_terms` terms.
pub fn qhyper_2phi1_brute(a: f64, b: f64, c: f64, q: f64, z: f64, n_terms: u32) -> Complex64 {
    let mut total = 0.0f64;
    let mut term = 1.0f64;
    let mut qn = 1.0f64;
    for _ in 0..n_terms {
        total += term;
        term *= (1.0 - a * qn) * (1.0 - b * qn) * z / ((1.0 - c * qn) * (1.0 - q * qn));
        qn *= q;
    }
    Complex64::new(total, 0.0)
}

/// Bilateral sum in the Appell-Lerch kernel of level `m`:
///
/// `sum_{n in Z} (-1)^{mn} y^n q^{m n(n+1)/2} / (1 - x q^n)`.
pub fn appell_kernel_brute(
    m: u32,
    x: Complex64,
    y: Complex64,
    q: f64,
    n_terms: i64,
) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for n in -n_terms..=n_terms {
        let sign = if (m as i64 * n).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        };
        let e = m as i64 * n * (n + 1) / 2;
        let num = sign * y.powi(n as i32) * q.powi(e as i32);
        s += num / (Complex64::new(1.0, 0.0) - x * q.powi(n as i32));
    }
    s
}

/// Zwegers mu as a raw bilateral sum plus the theta prefactor, both brute.
pub fn mu_brute(x: Complex64, y: Complex64, q: f64, n_terms: i64) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for n in -n_terms..=n_terms {
        let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let num = sign * y.powi(n as i32) * q.powi((n * (n + 1) / 2) as i32);
        s += num / (Complex64::new(1.0, 0.0) - x * q.powi(n as i32));
    }
    let i = Complex64::new(0.0, 1.0);
    let pref = i * Complex64::new(q, 0.0).powf(-0.125) * (x * y).sqrt();
    pref * s / theta_brute(-y, q, n_terms)
}

/// `g_2(x; q)` as a raw unilateral sum.
pub fn g2_brute(x: Complex64, q: f64, n_terms: u32) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let mut s = Complex64::new(0.0, 0.0);
    for n in 0..n_terms {
        // (-q; q)_n
        let mut num = one;
        for j in 1..=n {
            num *= one + q.powi(j as i32);
        }
        num *= q.powi((n * (n + 1) / 2) as i32);
        // (x; q)_{n+1} (q/x; q)_{n+1}
        let mut den = one;
        for j in 0..=n {
            den *= (one - x * q.powi(j as i32)) * (one - q.powi(j as i32 + 1) / x);
        }
        s += num / den;
    }
    s
}

/// `g_3(x; q)` as a raw unilateral sum.
pub fn g3_brute(x: Complex64, q: f64, n_terms: u32) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let mut s = Complex64::new(0.0, 0.0);
    for n in 0..n_terms {
        let num = Complex64::new(q.powi((n * (n + 1)) as i32), 0.0);
        let mut den = one;
        for j in 0..=n {
            den *= (one - x * q.powi(j as i32)) * (one - q.powi(j as i32 + 1) / x);
        }
        s += num / den;
    }
    s
}

pub fn laplace_plus_brute(
    f: impl Fn(Complex64) -> Complex64,
    x: Complex64,
    lambda: Complex64,
    q: f64,
    n_terms: i32,
) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for n in -n_terms..=n_terms {
        let grid = lambda * q.powi(n);
        let th = theta_brute(grid / x, q, 200);
        // Overflowed theta means the true denominator is astronomically
        // large, so the term contributes nothing.
        if th.is_finite() {
            s += f(grid) / th;
        }
    }
    s
}
