use std::f64::consts::PI;

use ehi::asymptotics::*;
use ehi::catalog;
use ehi::minimizer::{minimize_auto, minimize_exact};
use ehi::quadrature::spiridonov_rhs;
use ehi::special::EllipticParams;
use ehi::theory::*;
use ehi::Error;

#[test]
fn so3_prediction_is_pure_logarithm() {
    let t = catalog::load("so3_sqcd_nf2").unwrap();
    let m = minimize_exact(&t).unwrap();
    for b in [1.0, 1.4, 0.6] {
        for beta in [0.2, 0.5] {
            let p = predict_log_index(&t, b, beta, &m).unwrap();
            assert!((p - (2.0 * PI / beta).ln()).abs() < 1e-14);
        }
    }
}

#[test]
fn iss_prediction_value() {
    let t = catalog::load("iss").unwrap();
    let m = minimize_exact(&t).unwrap();
    let p = predict_log_index(&t, 1.0, 0.2, &m).unwrap();
    assert!((p - PI * PI / 0.6 / 5.0).abs() < 1e-12);
    assert!((p - 3.2899).abs() < 1e-4);
}

#[test]
fn prediction_scaling_and_b_symmetry() {
    for name in ["iss", "su2_sqcd_nf3", "su3_sqcd_nf4"] {
        let t = catalog::load(name).unwrap();
        let m = minimize_auto(&t, 40).unwrap();
        let (tr, _) = trace_anomalies(&t).unwrap();
        let lead = -PI * PI / 3.0 * 1.2_f64.mul_add(0.0, 0.5 * (1.3 + 1.0 / 1.3)) * (rational_to_f64(&tr) + 12.0 * m.l_min_f64);
        let scaled = 1e-6 * predict_log_index(&t, 1.3, 1e-6, &m).unwrap();
        assert!((scaled - lead).abs() < 1e-4 * lead.abs().max(1.0), "{name}");
        let a = predict_log_index(&t, 1.3, 0.3, &m).unwrap();
        let c = predict_log_index(&t, 1.0 / 1.3, 0.3, &m).unwrap();
        assert!((a - c).abs() < 1e-12 * a.abs(), "{name}");
    }
}

#[test]
fn chiral_prediction_refused() {
    let g = build_group(&[GroupDescriptor::new(GroupKind::SU, 3)]).unwrap();
    let w = rep_weights(&g, &RepDescriptor::Irrep { factor: 0, name: "fund".into() }).unwrap();
    let t = TheorySpec { name: "toy".into(), group: g, chirals: vec![ChiralMultiplet::new(w, rat(1, 2), 1)] };
    let m = minimize_exact(&catalog::load("su3_sqcd_nf4").unwrap()).unwrap();
    assert!(matches!(predict_log_index(&t, 1.0, 0.3, &m), Err(Error::ChiralTheory(_))));
}

#[test]
fn sqcd_ladder_contracts() {
    let t = catalog::load("su2_sqcd_nf3").unwrap();
    let r = residual_ladder(&t, 1.0, &[0.6, 0.45, 0.3], None).unwrap();
    assert!(r.differences[1].abs() < r.differences[0].abs(), "{:?}", r.residuals);
    // quadrature agrees with the exact closed side along the ladder
    for (beta, m) in r.beta_ladder.iter().zip(&r.measured_log) {
        let rhs = spiridonov_rhs(&EllipticParams::new(1.0, *beta).unwrap()).unwrap();
        assert!((m - rhs.ln().re).abs() < 1e-9, "beta={beta}");
    }
    assert_eq!(r.tr_r, Some(rat_int(-5)));
    assert_eq!((r.l_min.clone(), r.dim_hqu), (Some(rat_int(0)), 0));
}

#[test]
fn iss_ladder_differences_shrink() {
    let t = catalog::load("iss").unwrap();
    let r = residual_ladder(&t, 1.0, &[0.5, 0.35, 0.25], None).unwrap();
    assert!(r.differences[1].abs() < r.differences[0].abs());
    assert!(r.quadrature_error.iter().all(|e| *e < 1e-7));
    let csv = r.to_csv();
    assert!(csv.starts_with("beta,measured,predicted,residual\n"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn ladder_rejects_bad_order() {
    let t = catalog::load("iss").unwrap();
    assert!(matches!(residual_ladder(&t, 1.0, &[0.25, 0.35], None), Err(Error::InvalidArgument(_))));
    assert!(matches!(check_low_temperature(&t, 1.0, &[8.0, 6.0], None), Err(Error::InvalidArgument(_))));
}

#[test]
fn so3_all_orders_residuals() {
    let t = catalog::load("so3_sqcd_nf2").unwrap();
    let c = check_so3_all_orders(&t, &[0.5, 0.35, 0.2], None).unwrap();
    assert!(c.residuals.iter().all(|r| r.abs() < 1e-9), "{:?}", c.residuals);
    assert!(c.monotone(1e-12));
}

#[test]
fn beta_integral_identity_passes() {
    let t = catalog::load("su2_sqcd_nf3").unwrap();
    for (b, beta) in [(1.0, 1.0), (1.0, 0.7), (1.5, 1.0)] {
        let c = check_spiridonov_identity(&t, &EllipticParams::new(b, beta).unwrap(), 512).unwrap();
        assert!(c.passed, "{c:?}");
    }
    let coarse = check_spiridonov_identity(&t, &EllipticParams::new(1.0, 0.3).unwrap(), 16).unwrap();
    assert!(!coarse.passed);
}

#[test]
fn low_temperature_limit() {
    for name in ["su2_sqcd_nf3", "iss"] {
        let c = check_low_temperature(&catalog::load(name).unwrap(), 1.0, &[6.0, 8.0, 10.0], None).unwrap();
        assert!(c.passed, "{name}: {:?}", c.distance);
    }
    let mut prev = f64::INFINITY;
    for beta in [6.0, 8.0, 10.0, 20.0] {
        let d = (spiridonov_rhs(&EllipticParams::new(1.0, beta).unwrap()).unwrap() - 1.0).norm();
        assert!(d < prev);
        prev = d;
    }
    assert!(prev < 1e-3);
}

#[test]
fn conjecture_estimate_tracks_prediction() {
    let t = catalog::load("iss").unwrap();
    let m = minimize_exact(&t).unwrap();
    let est = conjecture_mode_estimate(&t, 1.0, 0.25, 3000).unwrap();
    assert_eq!(est.im, 0.0);
    assert!((est.re - predict_log_index(&t, 1.0, 0.25, &m).unwrap()).abs() < 1.0);
    let (a, c) = (
        conjecture_mode_estimate(&t, 1.0, 0.4, 3000).unwrap().re,
        conjecture_mode_estimate(&t, 1.0, 0.3, 3000).unwrap().re,
    );
    // β · log estimate approaches the 1/β coefficient
    let lead = PI * PI / 3.0 / 5.0;
    assert!((0.4 * a - lead).abs() < 0.2 * lead && (0.3 * c - lead).abs() < (0.4 * a - lead).abs());
}

#[test]
fn conjecture_estimate_constant_integrand() {
    // SU(2) with its roots removed: nothing depends on x
    let mut g = build_group(&[GroupDescriptor::new(GroupKind::SU, 2)]).unwrap();
    g.positive_roots.clear();
    let t = TheorySpec { name: "stub".into(), group: g, chirals: vec![] };
    let (b, beta) = (1.2, 0.3);
    let e0 = PI * PI / (3.0 * beta) * 0.5 * (b + 1.0 / b) * 3.0;
    let est = conjecture_mode_estimate(&t, b, beta, 16).unwrap();
    assert!((est.re - ((2.0 * PI / beta).ln() - e0)).abs() < 1e-12);
}
