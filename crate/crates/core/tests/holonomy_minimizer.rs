use ehi::catalog;
use ehi::minimizer::*;
use ehi::rains::{rains_l, RainsForm};
use ehi::theory::*;
use ehi::Error;
use num_traits::Zero;

fn r(n: i64, d: i64) -> Rational {
    rat(n, d)
}

fn normals(name: &str) -> Vec<WeightVector> {
    enumerate_hyperplanes(&catalog::load(name).unwrap()).normals
}

#[test]
fn hyperplanes_rank_one() {
    let h = enumerate_hyperplanes(&catalog::load("su2_sqcd_nf3").unwrap());
    assert_eq!(h.normals, vec![vec![1]]);
    assert_eq!(h.offsets[0], vec![r(-1, 2), r(0, 1), r(1, 2)]);

    let h = enumerate_hyperplanes(&catalog::load("iss").unwrap());
    assert_eq!(h.normals, vec![vec![1]]);
    // kinks of ϑ(kx) for k ∈ {1, 2, 3} inside the interval
    let mut want = vec![r(-1, 2), r(-1, 3), r(0, 1), r(1, 3), r(1, 2)];
    want.sort();
    assert_eq!(h.offsets[0], want);
}

#[test]
fn hyperplane_normals_so5() {
    let mut want = vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![1, -1]];
    want.sort();
    assert_eq!(normals("so5_sqcd_nf4"), want);
}

#[test]
fn minimizer_table() {
    let check = |name: &str, l: Rational, dim: usize| {
        let m = minimize_exact(&catalog::load(name).unwrap()).unwrap();
        assert_eq!(m.mode, Mode::Exact);
        assert_eq!(m.l_min, Some(l), "{name}");
        assert_eq!(m.dim_hqu, dim, "{name}");
        m
    };
    let zero = vec![Rational::zero(); 2];
    for name in ["su3_sqcd_nf4", "su3_sqcd_nf5", "sp4_sqcd_nf4"] {
        assert_eq!(check(name, rat_int(0), 0).vertices, vec![zero.clone()], "{name}");
    }
    check("so5_sqcd_nf4", rat_int(0), 1);
    check("so3_sqcd_nf2", rat_int(0), 1);
    let iss = check("iss", r(-2, 15), 0);
    assert_eq!(iss.vertices, vec![vec![r(-1, 3)], vec![r(1, 3)]]);
    check("su2_sqcd_nf3", rat_int(0), 0);
}

#[test]
fn class_s_exact_and_blocks_agree() {
    let t = catalog::load("class_s_g2").unwrap();
    assert_eq!(block_legs(&t).unwrap().len(), 2);
    let m = minimize_blocks(&t, 60).unwrap();
    assert_eq!(m.mode, Mode::Blocks);
    assert_eq!((m.l_min.clone(), m.dim_hqu), (Some(rat_int(0)), 3));
    assert_eq!(rains_l(&t, &m.vertices[0]).unwrap(), rat_int(0));
    let e = minimize_exact(&t).unwrap();
    assert_eq!((e.l_min, e.dim_hqu), (Some(rat_int(0)), 3));
    assert!(block_legs(&catalog::load("su2_sqcd_nf3").unwrap()).is_none());
}

#[test]
fn minimizing_vertices_are_true_vertices_and_symmetric() {
    for (name, t) in catalog::all() {
        if t.rank() > 2 {
            continue;
        }
        let m = minimize_exact(&t).unwrap();
        let h = enumerate_hyperplanes(&t);
        let form = RainsForm::new(&t);
        for v in &m.vertices {
            assert_eq!(form.l(v).unwrap(), m.l_min.clone().unwrap());
            let inc = h.incident(v);
            let rows: Vec<Vec<Rational>> = inc.iter().map(|(n, _)| n.iter().map(|c| rat_int(*c)).collect()).collect();
            assert_eq!(rational_rank(rows), t.rank(), "{name} {v:?}");
            let neg: Vec<Rational> = v.iter().map(|c| -c.clone()).collect();
            assert!(m.vertices.contains(&neg), "{name}: {v:?}");
        }
        assert!(m.l_min.unwrap() <= rat_int(0));
        assert!(m.dim_hqu <= t.rank());
    }
}

#[test]
fn so5_vertices_are_weyl_closed() {
    let m = minimize_exact(&catalog::load("so5_sqcd_nf4").unwrap()).unwrap();
    for v in &m.vertices {
        let swapped = vec![v[1].clone(), v[0].clone()];
        let flipped = vec![-v[0].clone(), v[1].clone()];
        assert!(m.vertices.contains(&swapped) && m.vertices.contains(&flipped), "{v:?}");
    }
}

#[test]
fn exact_and_grid_agree() {
    for (name, t) in catalog::all() {
        let res = if t.rank() == 3 { 30 } else { 120 };
        let e = minimize_exact(&t).unwrap();
        let g = minimize_grid(&t, res).unwrap();
        let diff = (rational_to_f64(e.l_min.as_ref().unwrap()) - g.l_min_f64).abs();
        assert!(diff <= agreement_bound(&t, res), "{name}: {diff}");
        assert!(g.l_min_f64 >= e.l_min_f64 - 1e-12, "{name}");
    }
}

#[test]
fn grid_examples() {
    let iss = catalog::load("iss").unwrap();
    let g = minimize_grid(&iss, 600).unwrap();
    assert!((g.l_min_f64 + 2.0 / 15.0).abs() < 1e-9);
    assert_eq!(g.dim_hqu, 0);
    let sp = minimize_grid(&catalog::load("sp4_sqcd_nf4").unwrap(), 80).unwrap();
    assert_eq!(sp.vertices, vec![vec![Rational::zero(); 2]]);
    assert_eq!(sp.dim_hqu, 0);
    assert_eq!(minimize_grid(&catalog::load("so5_sqcd_nf4").unwrap(), 80).unwrap().dim_hqu, 1);
    let cs = minimize_grid(&catalog::load("class_s_g2").unwrap(), 60).unwrap();
    assert!(cs.l_min_f64.abs() < 1e-12);
    assert_eq!(cs.dim_hqu, 3);
    assert!(matches!(minimize_grid(&iss, 4), Err(Error::InvalidArgument(_))));
}

#[test]
fn exact_mode_guards() {
    let mut t = catalog::load("su2_sqcd_nf3").unwrap();
    for c in &mut t.chirals {
        c.r_charge = RCharge::Float(1.0 / 3.0);
    }
    assert!(matches!(minimize_exact(&t), Err(Error::IrrationalCharges)));
    assert!(minimize_grid(&t, 60).is_ok());
    let g = build_group(&[GroupDescriptor::new(GroupKind::SU, 6)]).unwrap();
    let big = TheorySpec { name: "su6".into(), group: g, chirals: vec![] };
    assert!(matches!(minimize_exact(&big), Err(Error::RankTooLarge { rank: 5, limit: 4 })));
}
