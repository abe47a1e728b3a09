use std::f64::consts::PI;

use ehi::special::*;
use ehi::{Complex64, Error};
use proptest::prelude::*;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn pol() -> TruncationPolicy {
    TruncationPolicy::default()
}

#[test]
fn pochhammer_small_beta_asymptote() {
    let beta: f64 = 0.05;
    let q = Complex64::new((-beta).exp(), 0.0);
    let l = log_pochhammer(q, q, &pol()).unwrap();
    let want = -PI * PI / (6.0 * beta) + 0.5 * (2.0 * PI / beta).ln() + beta / 24.0;
    assert!((l.re - want).abs() <= 1e-8, "{} vs {want}", l.re);
    assert!(l.im.abs() < 1e-12);
}

#[test]
fn hyperbolic_matches_closed_form_on_grid() {
    for k in 1..=9 {
        let u = k as f64 / 10.0;
        let a = hyperbolic_gamma(Complex64::new(0.0, u), 1.0).unwrap();
        let b = hyperbolic_gamma_b1(u).unwrap();
        assert!((a - b).norm() < 1e-9, "x = {u}: {a} vs {b}");
    }
}

#[test]
fn hyperbolic_conjugation_example() {
    let b = 1.3;
    let x = Complex64::new(0.2, 0.9);
    let l = hyperbolic_gamma(Complex64::new(-x.re, x.im), b).unwrap();
    let r = hyperbolic_gamma(x, b).unwrap().conj();
    assert!((l - r).norm() < 1e-9);
}

#[test]
fn hyperbolic_gamma_at_point_four_i() {
    let a = hyperbolic_gamma(Complex64::new(0.0, 0.4), 1.0).unwrap();
    let b = hyperbolic_gamma_b1(0.4).unwrap();
    assert!((a - b).norm() < 1e-9);
}

fn wrapped(d: Complex64) -> f64 {
    let im = (d.im + PI).rem_euclid(2.0 * PI) - PI;
    Complex64::new(d.re, im).norm()
}

#[test]
fn hyperbolic_large_argument_estimate() {
    let (r, b) = (0.7, 1.1);
    let omega = Complex64::new(0.0, 0.5 * (b + 1.0 / b));
    for sign in [1.0, -1.0] {
        let mut prev = f64::INFINITY;
        for x in [5.0, 10.0, 20.0] {
            let x = sign * x;
            let exact = log_hyperbolic_gamma(Complex64::new(x, 0.0) + r * omega, b).unwrap();
            let est = hyperbolic_gamma_asymptotic_log(x, r, b);
            let d = wrapped(exact - est);
            assert!(d <= prev.max(1e-9), "x = {x}: {d} after {prev}");
            prev = d;
        }
        assert!(prev < 1e-9);
    }
}

#[test]
fn modular_product_example_b1() {
    let e = EllipticParams::new(1.0, 1.0).unwrap();
    let (lhs, rhs) = narukawa_check(0.2, &e, 40, &pol()).unwrap();
    assert!((lhs / rhs - 1.0).norm() < 1e-6, "{lhs} vs {rhs}");
}

#[test]
fn modular_product_at_origin_is_a_pole() {
    // z = 1 is a pole of the elliptic gamma function
    let e = EllipticParams::new(1.0, 1.0).unwrap();
    assert!(matches!(narukawa_check(0.0, &e, 10, &pol()), Err(Error::PoleHit(_))));
}

#[test]
fn modular_product_tail_shrinks() {
    let e = EllipticParams::new(1.4, 0.7).unwrap();
    let mut prev = f64::INFINITY;
    for n in [20, 40, 60] {
        let (lhs, rhs) = narukawa_check(0.35, &e, n, &pol()).unwrap();
        let res = (lhs / rhs - 1.0).norm();
        assert!(res <= prev.max(1e-13), "n_max = {n}: {res} after {prev}");
        assert!(res < 1e-6);
        prev = res;
    }
}

#[test]
fn beta_integral_side_tends_to_one_at_low_temperature() {
    let mut prev = f64::INFINITY;
    for beta in [6.0, 8.0, 10.0] {
        let e = EllipticParams::new(1.0, beta).unwrap();
        let z = Complex64::new((e.p() * e.q()).powf(1.0 / 3.0), 0.0);
        let v = elliptic_gamma(z, &e, &pol()).unwrap().powi(15);
        let d = (v - 1.0).norm();
        assert!(d < prev);
        prev = d;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn elliptic_reflection_on_unit_circle(phase in 0.01f64..0.99, b in 0.6f64..1.6, beta in 0.5f64..2.0) {
        let e = EllipticParams::new(b, beta).unwrap();
        let z = (2.0 * PI * I * phase).exp();
        let pq = Complex64::new(e.p() * e.q(), 0.0);
        let g = elliptic_gamma(z, &e, &pol()).unwrap() * elliptic_gamma(pq / z, &e, &pol()).unwrap();
        prop_assert!((g - 1.0).norm() < 1e-10);
    }

    #[test]
    fn hyperbolic_conjugation(xr in -2.0f64..2.0, frac in 0.05f64..0.95, b in 0.5f64..2.0) {
        let y = frac * (b + 1.0 / b);
        let l = hyperbolic_gamma(Complex64::new(-xr, y), b).unwrap();
        let r = hyperbolic_gamma(Complex64::new(xr, y), b).unwrap().conj();
        prop_assert!((l - r).norm() < 1e-9 * r.norm().max(1.0));
    }

    #[test]
    fn hyperbolic_shift(xr in -1.5f64..1.5, frac in 0.05f64..0.95, b in 0.6f64..1.7) {
        let x = Complex64::new(xr, frac * b);
        let lhs = hyperbolic_gamma(x + I / b, b).unwrap() / hyperbolic_gamma(x, b).unwrap();
        let rhs = 2.0 * (PI * x / (I * b)).sin();
        prop_assert!((lhs - rhs).norm() < 1e-9 * rhs.norm().max(1.0));
    }

    #[test]
    fn hyperbolic_reflection(xr in -1.5f64..1.5, frac in 0.05f64..0.95, b in 0.6f64..1.7) {
        let q = b + 1.0 / b;
        let x = Complex64::new(xr, frac * q);
        let v = hyperbolic_gamma(x, b).unwrap() * hyperbolic_gamma(I * q - x, b).unwrap();
        prop_assert!((v - 1.0).norm() < 1e-9);
    }
}
