use ehi::catalog;
use ehi::theory::*;
use ehi::Error;
use proptest::prelude::*;

fn su(n: usize) -> GaugeGroup {
    build_group(&[GroupDescriptor::new(GroupKind::SU, n)]).unwrap()
}

fn irrep(name: &str) -> RepDescriptor {
    RepDescriptor::Irrep { factor: 0, name: name.into() }
}

fn sorted(mut v: Vec<WeightVector>) -> Vec<WeightVector> {
    v.sort();
    v
}

#[test]
fn su2_group() {
    let g = su(2);
    assert_eq!(g.positive_roots, vec![vec![2]]);
    assert_eq!((g.dim, g.weyl_order), (3, 2));
}

#[test]
fn su3_positive_roots() {
    let g = su(3);
    assert_eq!(sorted(g.positive_roots.clone()), sorted(vec![vec![1, -1], vec![2, 1], vec![1, 2]]));
    assert_eq!((g.dim, g.weyl_order), (8, 6));
}

#[test]
fn so5_from_root_enumeration() {
    let g = build_group(&[GroupDescriptor::new(GroupKind::SO, 5)]).unwrap();
    assert_eq!((g.positive_roots.len(), g.dim, g.weyl_order), (4, 10, 8));
    // B2 roots: all integer vectors with squared length 1 or 2
    let mut enumerated = Vec::new();
    for a in -2i64..=2 {
        for b in -2i64..=2 {
            let n = a * a + b * b;
            if (n == 1 || n == 2) && (a > 0 || (a == 0 && b > 0)) {
                enumerated.push(vec![a, b]);
            }
        }
    }
    assert_eq!(sorted(g.positive_roots), sorted(enumerated));
}

#[test]
fn named_representations() {
    assert_eq!(sorted(rep_weights(&su(2), &irrep("fund")).unwrap()), vec![vec![-1], vec![1]]);
    assert_eq!(sorted(rep_weights(&su(2), &irrep("spin:3/2")).unwrap()), vec![vec![-3], vec![-1], vec![1], vec![3]]);
    let g = build_group(&[GroupDescriptor::new(GroupKind::SU, 2); 3]).unwrap();
    let tri = RepDescriptor::Tensor((0..3).map(|f| RepDescriptor::Irrep { factor: f, name: "fund".into() }).collect());
    let w = rep_weights(&g, &tri).unwrap();
    assert_eq!(w.len(), 8);
    assert!(w.iter().all(|v| v.iter().all(|c| c.abs() == 1)));
    let mut uniq = w.clone();
    uniq.sort();
    uniq.dedup();
    assert_eq!(uniq.len(), 8);
}

#[test]
fn catalog_weights_sum_to_zero_and_validate() {
    for (name, t) in catalog::all() {
        let rep = validate_theory(&t);
        assert!(rep.passed(), "{name}: {:?}", rep.messages());
    }
}

#[test]
fn catalog_fails_when_a_charge_moves() {
    for (name, t) in catalog::all() {
        for j in 0..t.chirals.len() {
            let mut u = t.clone();
            if let RCharge::Exact(r) = &u.chirals[j].r_charge {
                u.chirals[j].r_charge = RCharge::Exact(r + rat(1, 100));
            }
            assert!(!validate_theory(&u).passed(), "{name}, chiral {j}");
        }
    }
}

#[test]
fn su2_sqcd_wrong_charge_reports_quadratic_entry() {
    let mut t = catalog::load("su2_sqcd_nf3").unwrap();
    for c in &mut t.chirals {
        c.r_charge = RCharge::Exact(rat(1, 2));
    }
    let rep = validate_theory(&t);
    assert_eq!(rep.quadratic_failures.len(), 1);
    assert_eq!((rep.quadratic_failures[0].0, rep.quadratic_failures[0].1), (0, 0));
}

#[test]
fn iss_quadratic_condition_balances() {
    let t = catalog::load("iss").unwrap();
    let sq: i64 = t.chirals[0].weights.iter().map(|w| w[0] * w[0]).sum();
    assert_eq!(sq, 20);
    assert!(validate_theory(&t).passed());
}

#[test]
fn trace_anomalies_of_catalog() {
    let tr = |n: &str| trace_anomalies(&catalog::load(n).unwrap()).unwrap().0;
    assert_eq!(tr("iss"), rat(7, 5));
    assert_eq!(tr("class_s_g2"), rat(2, 3));
    assert_eq!(tr("su2_sqcd_nf3"), rat_int(-5));
    assert_eq!(tr("bci_so3"), rat_int(2));
    assert_eq!(tr("bci_so5"), rat_int(4));
    assert_eq!(tr("so3_sqcd_nf2"), rat_int(0));
}

#[test]
fn chirality() {
    let iss = is_non_chiral(&catalog::load("iss").unwrap());
    assert!(iss.non_chiral);
    let mut pos: Vec<_> = iss.pairs.iter().map(|p| p.positive.clone()).collect();
    pos.sort();
    assert_eq!(pos, vec![vec![1], vec![3]]);

    let g = su(3);
    let w = rep_weights(&g, &irrep("fund")).unwrap();
    let t = TheorySpec { name: "x".into(), group: g, chirals: vec![ChiralMultiplet::new(w, rat(1, 2), 1)] };
    assert!(!is_non_chiral(&t).non_chiral);

    for n in ["su2_sqcd_nf3", "su3_sqcd_nf4", "su3_sqcd_nf5", "sp4_sqcd_nf4", "so3_sqcd_nf2", "so5_sqcd_nf4"] {
        assert!(is_non_chiral(&catalog::load(n).unwrap()).non_chiral, "{n}");
    }
}

#[test]
fn deformation_examples() {
    let t = catalog::load("su2_sqcd_nf3").unwrap();
    assert_eq!(deform_r_charges(&t, 0, &rat_int(0)).unwrap(), t);
    let d = deform_r_charges(&t, 0, &rat(1, 10)).unwrap();
    assert_eq!(d.chirals[0].r_charge, RCharge::Exact(rat(13, 30)));
    assert_eq!(d.chirals[1].r_charge, RCharge::Exact(rat(7, 30)));
    assert!(validate_theory(&d).passed());
    assert!(matches!(deform_r_charges(&t, 0, &rat_int(2)), Err(Error::ChargeWindowViolation { .. })));
    let iss = catalog::load("iss").unwrap();
    assert!(matches!(deform_r_charges(&iss, 0, &rat(1, 10)), Err(Error::MissingFlavorData(_))));
}

#[test]
fn flavor_anomaly_is_checked() {
    let mut t = catalog::load("su2_sqcd_nf3").unwrap();
    t.chirals[1].flavor_u1_charges = vec![rat_int(1)];
    assert!(matches!(deform_r_charges(&t, 0, &rat(1, 10)), Err(Error::FlavorAnomalyViolation { l: 0, m: 0 })));
    assert!(!validate_theory(&t).passed());
}

#[test]
fn flavor_weights_parse_and_validate() {
    let text = r#"{"name":"x","group":[{"type":"SU","n":2}],"chirals":[
        {"rep":"fund","r":"1/3","copies":3,"flavor_weights":[[1,0],[0,1],[-1,-1]]},
        {"rep":"fund","r":"1/3","copies":3,"flavor_weights":[[1,0],[0,1],[-1,-1]]}]}"#;
    let t = parse_theory(text).unwrap();
    assert!(validate_theory(&t).passed());
    let bad = text.replace("[-1,-1]]}]", "[1,1]]}]");
    assert!(!validate_theory(&parse_theory(&bad).unwrap()).passed());
}

#[test]
fn float_charges_are_flagged() {
    let text = r#"{"group":[{"type":"SU","n":2}],"chirals":[{"rep":"fund","r":0.3333333333333333,"copies":6}]}"#;
    let t = parse_theory(text).unwrap();
    assert!(!t.is_exact());
    assert!(matches!(trace_anomalies(&t), Err(Error::IrrationalCharges)));
    assert!(validate_theory(&t).passed());
}

fn split_copies(t: &TheorySpec) -> TheorySpec {
    let mut out = t.clone();
    out.chirals = t
        .chirals
        .iter()
        .flat_map(|c| {
            let mut one = c.clone();
            one.copies = 1;
            std::iter::repeat_n(one, c.copies as usize)
        })
        .collect();
    out
}

proptest! {
    #[test]
    fn traces_ignore_weight_order_and_copy_splitting(idx in 0usize..10, seed in any::<u64>()) {
        let (_, t) = catalog::all().swap_remove(idx);
        let base = trace_anomalies(&t).unwrap();
        let mut shuffled = t.clone();
        let mut s = seed;
        for c in &mut shuffled.chirals {
            let n = c.weights.len();
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                c.weights.swap(i, (s >> 33) as usize % (i + 1));
            }
        }
        prop_assert_eq!(trace_anomalies(&shuffled).unwrap(), base.clone());
        prop_assert_eq!(trace_anomalies(&split_copies(&t)).unwrap(), base);
    }

    #[test]
    fn deformation_round_trip(num in -9i64..=9, den in 1i64..40) {
        let t = catalog::load("su3_sqcd_nf5").unwrap();
        let lam = rat(num, den * 10);
        if let Ok(d) = deform_r_charges(&t, 0, &lam) {
            prop_assert_eq!(deform_r_charges(&d, 0, &-lam).unwrap(), t);
        }
    }
}
