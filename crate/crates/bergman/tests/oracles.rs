//! Closed-form values checked through the public API.

use std::f64::consts::{FRAC_1_PI, LN_2, PI};

use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use bergman::geometry::{
    bergman_distance, cap_l, carleson_contains, herm_dot, mobius_map, nonisotropic_distance, radial_project, BallPoint,
    CarlesonSet,
};
use bergman::kernels::{berezin, cell_statistics, kernel, mean_oscillation, mo_zbar_closed_form};
use bergman::measure::{integrate, moment, monomial_inner, tau_measure, QuadratureSpec, Region, WeightedMeasure};
use bergman::operator::{
    entrywise_schatten_check, hankel_matrix, hankel_zbar_spectrum_exact, project_symbol, singular_values,
    TruncatedBasis,
};
use bergman::symbol::Symbol;

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn disc(re: f64, im: f64) -> BallPoint {
    BallPoint::disc(re, im).unwrap()
}

fn boundary(re: f64, im: f64) -> BallPoint {
    BallPoint::boundary(vec![C64::new(re, im)]).unwrap()
}

fn abs_sq() -> Symbol {
    Symbol::disc_monomial(1, 1, 0, one())
}

#[test]
fn pairing_and_distance() {
    let h = herm_dot(&BallPoint::boundary(vec![one()]).unwrap(), &boundary(0.0, 1.0)).unwrap();
    assert_abs_diff_eq!(h.re, 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(h.im, -1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(bergman_distance(&BallPoint::origin(1), &disc(0.6, 0.0)).unwrap(), LN_2, epsilon = 1e-14);
    let z = disc(0.3, -0.4);
    assert_abs_diff_eq!(bergman_distance(&BallPoint::origin(1), &z).unwrap(), 0.5f64.atanh(), epsilon = 1e-14);
}

#[test]
fn disc_mobius_value() {
    let w = mobius_map(&disc(0.5, 0.0), &disc(0.2, 0.0)).unwrap();
    assert_abs_diff_eq!(w.coords()[0].re, 1.0 / 3.0, epsilon = 1e-15);
    assert_abs_diff_eq!(w.coords()[0].im, 0.0, epsilon = 1e-15);
}

#[test]
fn boundary_metric_values() {
    let b = nonisotropic_distance(&boundary(1.0, 0.0), &boundary(-1.0, 0.0)).unwrap();
    assert_abs_diff_eq!(b, 2f64.sqrt(), epsilon = 1e-15);
    let b = nonisotropic_distance(&boundary(1.0, 0.0), &boundary(0.0, 1.0)).unwrap();
    assert_abs_diff_eq!(b, 2f64.powf(0.25), epsilon = 1e-15);
}

#[test]
fn radial_projection_to_ln2() {
    let p = radial_project(&disc(0.3, 0.0), LN_2).unwrap();
    assert_abs_diff_eq!(p.coords()[0].re, 0.6, epsilon = 1e-15);
}

#[test]
fn carleson_membership() {
    let set = CarlesonSet::new(disc(0.5, 0.0), 1.0).unwrap();
    assert!(carleson_contains(&set, &disc(0.6, 0.0)));
    let deep = CarlesonSet::new(disc(0.9, 0.0), 1.0).unwrap();
    assert!(!carleson_contains(&deep, &disc(0.0, 0.5)));
}

#[test]
fn cap_constant_in_the_disc() {
    assert_abs_diff_eq!(cap_l(1, 1.0).unwrap().value, 1.0 / 3.0, epsilon = 1e-12);
    assert_abs_diff_eq!(cap_l(1, 1e-6).unwrap().value, FRAC_1_PI, epsilon = 1e-9);
}

#[test]
fn moments_and_inner_products() {
    assert_abs_diff_eq!(moment(2, 0.0), 1.0 / 3.0, epsilon = 1e-15);
    assert_abs_diff_eq!(moment(1, 1.0), 1.0 / 3.0, epsilon = 1e-15);
    for k in 0..10 {
        assert_abs_diff_eq!(moment(k, 0.0), 1.0 / (k as f64 + 1.0), epsilon = 1e-14);
    }
    let v = monomial_inner(2, 1, 1, 0, 0.0);
    assert_abs_diff_eq!(v.re, 1.0 / 3.0, epsilon = 1e-15);
    assert_abs_diff_eq!(monomial_inner(2, 1, 0, 0, 0.0).norm(), 0.0, epsilon = 1e-15);
}

#[test]
fn quadrature_values() {
    let q = QuadratureSpec::default();
    let m = WeightedMeasure::new(1, 0.0).unwrap();
    let v = integrate(|z| C64::new(z.norm_sq(), 0.0), &Region::Ball { eps: 0.0 }, &m, &q).unwrap();
    assert_abs_diff_eq!(v.value.re, 0.5, epsilon = 1e-12);
    let eps = 1.0 - 0.5f64.sqrt();
    assert_abs_diff_eq!(tau_measure(&Region::Ball { eps }, 1, &q).unwrap(), PI, epsilon = 1e-9);
}

#[test]
fn kernel_and_berezin() {
    let k = kernel(&disc(0.5, 0.0), &disc(0.5, 0.0), 0.0).unwrap();
    assert_abs_diff_eq!(k.re, 16.0 / 9.0, epsilon = 1e-13);
    let b = berezin(&abs_sq(), &BallPoint::origin(1), 0.0).unwrap();
    assert_abs_diff_eq!(b.re, 0.5, epsilon = 1e-12);
    let w = disc(0.35, -0.2);
    let b = berezin(&Symbol::zbar(), &w, 0.0).unwrap();
    assert_abs_diff_eq!((b - w.coords()[0].conj()).norm(), 0.0, epsilon = 1e-10);
}

#[test]
fn mean_oscillation_of_zbar() {
    let at0 = mean_oscillation(&Symbol::zbar(), &BallPoint::origin(1), 0.0).unwrap();
    assert_abs_diff_eq!(at0, 0.5f64.sqrt(), epsilon = 1e-12);
    let w = disc(0.5f64.sqrt(), 0.0);
    let mo = mean_oscillation(&Symbol::zbar(), &w, 0.0).unwrap();
    // At t = 1/2 the square is ln 2 − 1/2; the five displayed digits are truncated.
    assert_abs_diff_eq!(mo, (LN_2 - 0.5).sqrt(), epsilon = 1e-10);
    assert_abs_diff_eq!(mo, 0.43948, epsilon = 1e-5);
    assert_abs_diff_eq!(mo, mo_zbar_closed_form(0.5), epsilon = 1e-10);
}

#[test]
fn disc_cell_statistics() {
    let s = cell_statistics(&abs_sq(), &Region::Ball { eps: 0.0 }, 0.0, &QuadratureSpec::default()).unwrap();
    assert_abs_diff_eq!(s.mean.re, 0.5, epsilon = 1e-12);
    assert_abs_diff_eq!(s.oscillation * s.oscillation, 1.0 / 12.0, epsilon = 1e-12);
}

#[test]
fn projections_of_monomials() {
    let p = project_symbol(&abs_sq(), 0.0);
    let z = disc(0.2, 0.7);
    assert_abs_diff_eq!((p.eval(&z) - C64::new(0.5, 0.0)).norm(), 0.0, epsilon = 1e-14);
    let p = project_symbol(&Symbol::disc_monomial(2, 1, 0, one()), 0.0);
    assert_abs_diff_eq!((p.eval(&z) - z.coords()[0] * (2.0 / 3.0)).norm(), 0.0, epsilon = 1e-14);
}

#[test]
fn hankel_zbar_spectrum() {
    for gamma in [0.0, 2.0] {
        let basis = TruncatedBasis::new(48, gamma).unwrap();
        let s = singular_values(&hankel_matrix(&basis, &Symbol::zbar()).unwrap().data).unwrap();
        let exact = hankel_zbar_spectrum_exact(gamma, 20);
        for (a, e) in exact.iter().enumerate() {
            let af = a as f64;
            let formula = ((1.0 + gamma) / ((af + 1.0 + gamma) * (af + 2.0 + gamma))).sqrt();
            assert_abs_diff_eq!(*e, formula, epsilon = 1e-15);
            assert_abs_diff_eq!(s[a], *e, epsilon = 1e-10);
        }
    }
}

#[test]
fn entrywise_bound_on_a_swap() {
    let t = DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), one(), one(), C64::new(0.0, 0.0)]);
    let b = entrywise_schatten_check(&t, 1.0).unwrap();
    assert_abs_diff_eq!(b.schatten, 2.0, epsilon = 1e-12);
    assert_abs_diff_eq!(b.entrywise, 2.0, epsilon = 1e-12);
}
