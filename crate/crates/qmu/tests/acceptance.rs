//! End-to-end acceptance gate for the library.
//!
//! Each test pins one verification target with its tolerance and sample
//! count written out in the assertions, runs it through the public API,
//! and prints a single `ACCEPTANCE NN PASS` line on success. The numbered
//! list is the contract for the whole workspace; the companion CLI crate
//! carries the final determinism criterion (15).

use std::collections::BTreeSet;
use std::time::Instant;

use num_complex::Complex64;
use num_rational::Ratio;
use qmu::operator::{op_diver, op_gm1};
use qmu::transforms::{integral_solution, ExpansionPoint};
use qmu::{run_check, Ctx64, Report};

fn ctx() -> Ctx64 {
    // The registry draws its own nome per sample; this nome only seeds
    // tolerances and budgets.
    Ctx64::real_nome(0.25).unwrap()
}

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Run one named check and bind it to a pinned threshold.
fn expect(name: &str, n_samples: u32, threshold: f64) -> Report {
    let report = run_check(name, n_samples, &ctx()).unwrap();
    assert!(
        report.pass,
        "{name}: {} of {} samples failed, first: {:?}",
        report.failures.len(),
        report.n_samples,
        report.failures.first()
    );
    assert!(
        report.max_residual < threshold,
        "{name}: max residual {} is not below {threshold}",
        report.max_residual
    );
    report
}

#[test]
fn criterion_01_theta_sum_product_consistency() {
    let start = Instant::now();
    let report = expect("theta_consistency", 1000, 1e-12);
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "1000 theta samples took {elapsed:?}"
    );
    println!(
        "ACCEPTANCE 01 PASS theta bilateral sum vs triple product: 1000 samples, max residual {:.2e}, {elapsed:?}",
        report.max_residual
    );
}

#[test]
fn criterion_02_theta_shift_relation() {
    let report = expect("theta_shift", 200, 1e-12);
    println!(
        "ACCEPTANCE 02 PASS theta shift law over n in -3..=3: 200 samples, max residual {:.2e}",
        report.max_residual
    );
}

#[test]
fn criterion_03_mu_identities() {
    let mut worst = 0.0f64;
    for name in ["mu_symmetry", "mu_shift", "mu_translation"] {
        let report = expect(name, 50, 1e-9);
        worst = worst.max(report.max_residual);
    }
    println!(
        "ACCEPTANCE 03 PASS mu symmetry, inversion, elliptic shift, translation: 50 samples each, max residual {worst:.2e}"
    );
}

#[test]
fn criterion_04_linear_equation_fundamental_solutions() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for name in ["thm11_2", "thm11_3", "thm11_4"] {
        let report = expect(name, 50, 1e-8);
        worst = worst.max(report.max_residual);
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "order 2..4 fundamental-solution checks took {elapsed:?}"
    );
    println!(
        "ACCEPTANCE 04 PASS fundamental solutions of the mu equation, orders 2..4: 50 samples each, max residual {worst:.2e}, {elapsed:?}"
    );
}

#[test]
fn criterion_05_appell_operator_annihilation() {
    let mut worst = 0.0f64;
    for name in ["thm12_1", "thm12_2", "thm12_3"] {
        let report = expect(name, 50, 1e-8);
        worst = worst.max(report.max_residual);
    }
    println!(
        "ACCEPTANCE 05 PASS order-(m+1) operator annihilates G_m, m in 1..=3: 50 samples each, max residual {worst:.2e}"
    );
}

#[test]
fn criterion_06_appell_mu_decompositions() {
    let mut worst = 0.0f64;
    for name in [
        "zwegers_Z_1",
        "zwegers_Z_2",
        "zwegers_Z_3",
        "gm_mu_1",
        "gm_mu_2",
        "gm_mu_3",
    ] {
        let report = expect(name, 50, 1e-9);
        worst = worst.max(report.max_residual);
    }
    let a1 = expect("a1_mu", 50, 1e-10);
    println!(
        "ACCEPTANCE 06 PASS A_m/G_m mu-decompositions m in 1..=3 (max residual {worst:.2e}); level one matches the A_1-mu relation to {:.2e}",
        a1.max_residual
    );
}

#[test]
fn criterion_07_g2_g3_mu_closed_forms() {
    let g2 = expect("kang_g2", 50, 1e-9);
    let g3 = expect("kang_g3", 50, 1e-9);
    let base = g3.resolved_base.clone().expect("kang_g3 records its base");
    assert_eq!(base, "q^3");
    println!(
        "ACCEPTANCE 07 PASS g2/g3 mu closed forms: 50 samples each, max residual {:.2e}, g3 first-term base resolved to {base}",
        g2.max_residual.max(g3.max_residual)
    );
}

#[test]
fn criterion_08_lerch_forms() {
    let a = expect("lerch_g2", 50, 1e-9);
    let b = expect("lerch_g3", 50, 1e-9);
    println!(
        "ACCEPTANCE 08 PASS series vs Appell-quotient forms of g2/g3: 50 samples each, max residual {:.2e}",
        a.max_residual.max(b.max_residual)
    );
}

#[test]
fn criterion_09_pseudo_periodicity() {
    let mut worst = 0.0f64;
    for name in [
        "gm_pseudoperiod_1",
        "gm_pseudoperiod_2",
        "gm_pseudoperiod_3",
        "gm_pseudoperiod_4",
    ] {
        let report = expect(name, 50, 1e-9);
        worst = worst.max(report.max_residual);
    }
    println!(
        "ACCEPTANCE 09 PASS G_m pseudo-periodicity m in 1..=4: 50 samples each, max residual {worst:.2e}"
    );
}

#[test]
fn criterion_10_gm_at_one_corollaries() {
    let mut worst_pointwise = 0.0f64;
    let mut worst_operator = 0.0f64;
    for m in ["2", "3"] {
        let a = expect(&format!("corA_{m}"), 50, 1e-9);
        let base = a.resolved_base.clone().expect("corA records its base");
        assert_eq!(base, "theta base q^m");
        let b = expect(&format!("corB_{m}"), 50, 1e-8);
        let c = expect(&format!("corC_{m}"), 50, 1e-9);
        let d = expect(&format!("corD_{m}"), 50, 1e-9);
        let e = expect(&format!("corE_{m}"), 50, 1e-8);
        worst_pointwise = worst_pointwise
            .max(a.max_residual)
            .max(c.max_residual)
            .max(d.max_residual);
        worst_operator = worst_operator.max(b.max_residual).max(e.max_residual);
    }
    println!(
        "ACCEPTANCE 10 PASS G_m(x,1) shift/operator/closed/translated/inverted corollaries, m in 2..=3: max pointwise {worst_pointwise:.2e}, max operator {worst_operator:.2e}, theta base resolved to q^m"
    );
}

#[test]
fn criterion_11_borel_commutation() {
    let report = expect("bl_commutation", 50, 1e-13);
    println!(
        "ACCEPTANCE 11 PASS Borel/Laplace commutation on degree-10 series, m,n in 0..=3, both signs: max discrepancy {:.2e}",
        report.max_residual
    );
}

#[test]
fn criterion_12_resummation_chain() {
    let report = expect("borel_laplace_mu", 25, 1e-9);
    println!(
        "ACCEPTANCE 12 PASS divergent-series resummation reproduces mu: 25 samples, max residual {:.2e}",
        report.max_residual
    );
}

#[test]
fn criterion_13_divergent_family_solutions() {
    let mut worst_formal = 0.0f64;
    for name in ["lemma31_formal_2", "lemma31_formal_3"] {
        let report = expect(name, 50, 1e-10);
        worst_formal = worst_formal.max(report.max_residual);
    }
    let mut worst_integral = 0.0f64;
    for name in ["lemma31_integral_2", "lemma31_integral_3"] {
        let report = expect(name, 50, 1e-8);
        worst_integral = worst_integral.max(report.max_residual);
    }

    // Contour-node doubling stability at a pinned sample.
    let alphas = [cx(0.4, 0.0), cx(0.9, 0.0)];
    let betas = [cx(1.1, 0.0), cx(0.3, 0.0)];
    let x = cx(0.45, 0.0);
    let base = Ctx64::real_nome(0.2).unwrap();
    for point in [ExpansionPoint::Zero, ExpansionPoint::Infinity] {
        let coarse = integral_solution(
            point,
            &alphas,
            &betas,
            x,
            &base.with_contour_points(32).unwrap(),
        )
        .unwrap();
        let fine = integral_solution(
            point,
            &alphas,
            &betas,
            x,
            &base.with_contour_points(64).unwrap(),
        )
        .unwrap();
        let rel = (coarse - fine).norm() / (1.0 + coarse.norm().max(fine.norm()));
        assert!(
            rel < 1e-11,
            "{point:?}: node doubling moved the value by {rel}"
        );
    }
    println!(
        "ACCEPTANCE 13 PASS divergent-family solutions, orders 2..=3: formal coefficients to {worst_formal:.2e} at N=30, integral solutions to {worst_integral:.2e}, node-doubling stable to 1e-11"
    );
}

#[test]
fn criterion_14_newton_puiseux_diagrams() {
    let report = expect("np_diagram", 1, 1e-12);
    assert_eq!(report.max_residual, 0.0);

    let c = Ctx64::real_nome(0.2).unwrap();
    let diver = op_diver(&[cx(0.4, 0.0)], &[cx(1.1, 0.0)], &c).newton_puiseux();
    let expected: BTreeSet<(i64, i64)> = [(0, 2), (0, 1), (1, 1), (1, 0)].into_iter().collect();
    assert_eq!(diver.points, expected);
    assert_eq!(diver.hull_vertices, vec![(0, 1), (1, 0)]);
    assert_eq!(diver.slopes, vec![Ratio::new(-1, 1)]);

    let gm1 = op_gm1(2, &c).newton_puiseux();
    let expected: BTreeSet<(i64, i64)> = [(0, 2), (0, 1), (2, 1), (2, 0)].into_iter().collect();
    assert_eq!(gm1.points, expected);
    assert_eq!(gm1.hull_vertices, vec![(0, 1), (2, 0)]);
    assert_eq!(gm1.slopes, vec![Ratio::new(-1, 2)]);

    println!(
        "ACCEPTANCE 14 PASS Newton-Puiseux points, hulls, and slopes match the hand-derived diagrams exactly"
    );
}
