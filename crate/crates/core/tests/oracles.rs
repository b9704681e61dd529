//! Library results checked against values computed independently in
//! tests/common.

mod common;

use common::*;
use num_complex::Complex64;
use tmnlcs::constructors::{build_by_exponential, build_by_recursion, build_perelomov_closed};
use tmnlcs::fock::{self, FockLadderState};
use tmnlcs::nlfun::catalog;
use tmnlcs::verify::{eigen_residual, fidelity};
use tmnlcs::{Catalog, StateKind, StateSpec, Truncation};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn pair(zeta: Complex64, q: u32) -> FockLadderState {
    build_by_recursion(&StateSpec::new(StateKind::Pair, zeta, q)).unwrap()
}

#[test]
fn pair_ground_amplitude_matches_series() {
    let expected = 1.0 / inverse_factorial_square_sum(false).sqrt();
    let s = pair(c(1.0), 0);
    assert!((s.amplitudes()[0].re - expected).abs() < 1e-12);
    assert!((expected - 0.662_32).abs() < 1e-5);
}

#[test]
fn pair_overlap_with_negated_eigenvalue() {
    let expected = inverse_factorial_square_sum(true) / inverse_factorial_square_sum(false);
    let ip = fock::inner_product(&pair(c(1.0), 0), &pair(c(-1.0), 0)).unwrap();
    assert!((ip.re - expected).abs() < 1e-12, "{ip} vs {expected}");
    assert!(ip.im.abs() < 1e-15);
}

#[test]
fn pair_matches_closed_form_amplitudes() {
    for (zeta, q) in [
        (Complex64::from_polar(0.7, 0.4), 0),
        (c(1.5), 3),
        (Complex64::new(-0.3, 1.1), 5),
    ] {
        let s = pair(zeta, q);
        let oracle = pair_closed_form(zeta, q, s.amplitudes().len() + 10);
        assert!((vec_fidelity(s.amplitudes(), &oracle) - 1.0).abs() < 1e-13);
        let norm: f64 = oracle.iter().map(|c| c.norm_sqr()).sum();
        assert!((s.amplitudes()[0].re - 1.0 / norm.sqrt()).abs() < 1e-13);
    }
}

#[test]
fn ab_scales_pair_state_by_eigenvalue() {
    let s = pair(c(0.5), 0);
    let lowered = fock::apply_lower_both(&s);
    let n = s.truncation_n();
    for (l, x) in lowered.amplitudes()[..n].iter().zip(s.amplitudes()) {
        assert!((l - 0.5 * x).norm() < 1e-12);
    }
}

#[test]
fn perelomov_closed_matches_matrix_exponential() {
    for xi in [c(0.25), c(0.5), c(1.0), Complex64::from_polar(0.6, 1.0)] {
        for q in [0, 1, 3] {
            let s = build_perelomov_closed(xi, q, &Truncation::adaptive()).unwrap();
            let dim = s.amplitudes().len() + 32;
            let u = expm(&two_mode_squeeze_generator(xi, q, dim));
            let mut ground = vec![ZERO; dim];
            ground[0] = c(1.0);
            let psi = u.apply(&ground);
            let f = vec_fidelity(s.amplitudes(), &psi);
            assert!(f >= 1.0 - 1e-8, "xi={xi} q={q}: {f}");
        }
    }
}

#[test]
fn perelomov_ground_amplitude() {
    // c_0 = (1 - |tau|^2)^((q+1)/2) with tau = tanh(0.5), q = 0
    let s = build_perelomov_closed(c(0.5), 0, &Truncation::adaptive()).unwrap();
    let t = 0.5f64.tanh();
    assert!((s.amplitudes()[0].re - (1.0 - t * t).sqrt()).abs() < 1e-14);
    assert!((s.amplitudes()[0].re - 0.886_819).abs() < 1e-6);
}

#[test]
fn perelomov_residual_uses_tau() {
    let spec = StateSpec::new(StateKind::Perelomov, c(0.8), 0);
    let s = build_by_recursion(&spec).unwrap();
    let tau = 0.8f64.tanh();
    assert!((tau - 0.664_037).abs() < 1e-6);
    let r = eigen_residual(&s, &catalog(Catalog::PerelomovReduced), c(tau)).unwrap();
    assert!(r < 1e-10);
}

#[test]
fn dual_routes_agree_for_unit_pair() {
    let spec = StateSpec::new(StateKind::Pair, c(1.0), 0);
    let a = build_by_recursion(&spec).unwrap();
    let b = build_by_exponential(&spec).unwrap();
    assert!((fidelity(&a, &b).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn pair_residual_example() {
    let s = pair(c(1.2), 2);
    assert!(eigen_residual(&s, &catalog(Catalog::Unity), c(1.2)).unwrap() < 1e-10);
}

#[test]
fn matrix_exponential_oracle_is_unitary() {
    // sanity of the oracle itself: exp of an anti-Hermitian matrix is unitary
    let h = two_mode_squeeze_generator(Complex64::new(0.3, 0.4), 2, 20);
    let u = expm(&h);
    for j in 0..4 {
        let mut e = vec![ZERO; 20];
        e[j] = c(1.0);
        let col = u.apply(&e);
        let n: f64 = col.iter().map(|c| c.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-13);
    }
}
