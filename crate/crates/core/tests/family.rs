mod common;

use common::*;
use icis::family::{jacobian_module, specialize, GermFamily, JacobianKind, Locus};
use icis::ring::Polynomial;

fn umbrella(b: u32) -> GermFamily {
    let r = ring("w v", "y");
    GermFamily::new(r.clone(), vec![poly(&format!("w^2 - v^3 + v^2*y^{b}"), &r)], None, Locus::Section).unwrap()
}

fn quartic_icis() -> GermFamily {
    let r = ring("X1 X2 X3 X4", "y");
    let eqs = ["X1^2 + X2^2 + X3^2 + y*X4", "X1^4 + X2^4 + X3^4 + X4^2"].iter().map(|e| poly(e, &r)).collect();
    GermFamily::new(r, eqs, None, Locus::Section).unwrap()
}

#[test]
fn dimensions() {
    let hm = quartic_icis();
    assert_eq!((hm.p(), hm.l(), hm.m(), hm.d(), hm.r()), (2, 4, 1, 2, 3));
    let u = umbrella(1);
    assert_eq!((u.p(), u.l(), u.m()), (1, 2, 1));
    let r = ring("x y", "t");
    let f_only = GermFamily::new(r.clone(), vec![], Some(poly("x^2 + t*y^2", &r)), Locus::Section).unwrap();
    assert_eq!(f_only.p(), 0);
}

#[test]
fn umbrella_jacobians() {
    let u = umbrella(1);
    let r = &u.ring;
    let abs = jacobian_module(&u, JacobianKind::Absolute).unwrap();
    let row: Vec<Polynomial> = abs.gens.iter().map(|c| c[0].clone()).collect();
    assert_eq!(row, vec![poly("2*w", r), poly("-3*v^2 + 2*v*y", r), poly("v^2", r)]);
    assert_eq!(abs.relations, u.equations);
    for b in 1..=3 {
        let u = umbrella(b);
        let par = jacobian_module(&u, JacobianKind::Param).unwrap();
        let want = poly(&format!("{b}*v^2*y^{}", b - 1), &u.ring);
        assert_eq!(par.gens, vec![vec![want]]);
    }
}

#[test]
fn absolute_is_relative_then_param() {
    for fam in [umbrella(2), quartic_icis()] {
        let abs = jacobian_module(&fam, JacobianKind::Absolute).unwrap();
        let mut cols = jacobian_module(&fam, JacobianKind::Relative).unwrap().gens;
        cols.extend(jacobian_module(&fam, JacobianKind::Param).unwrap().gens);
        assert_eq!(abs.gens, cols);
    }
}

#[test]
fn augmented_shapes() {
    let r = ring("x y z", "t");
    let fam = GermFamily::new(r.clone(), vec![], Some(poly("x^2", &r)), Locus::Section).unwrap();
    let m = jacobian_module(&fam, JacobianKind::Augmented).unwrap();
    assert_eq!(m.rank, 1);
    let row: Vec<Polynomial> = m.gens.iter().map(|c| c[0].clone()).collect();
    assert_eq!(row, vec![poly("2*x", &r), Polynomial::zero(4), Polynomial::zero(4), Polynomial::zero(4)]);
    assert!(jacobian_module(&umbrella(1), JacobianKind::Augmented).is_err());
    let fam = GermFamily::new(r.clone(), vec![poly("x^2 + y^2 + z^2", &r)], Some(poly("z + t*x", &r)), Locus::Section)
        .unwrap();
    let m = jacobian_module(&fam, JacobianKind::AugmentedRelative).unwrap();
    assert_eq!((m.rank, m.gens.len()), (2, 3));
    assert_eq!(jacobian_module(&fam, JacobianKind::AugmentedParam).unwrap().gens, vec![vec![Polynomial::zero(4), poly("x", &r)]]);
}

#[test]
fn specialization_examples() {
    let hm = quartic_icis();
    let g = specialize(&hm, &[q(0)]).unwrap();
    let fr = ring("X1 X2 X3 X4", "");
    assert_eq!(g.equations, vec![poly("X1^2 + X2^2 + X3^2", &fr), poly("X1^4 + X2^4 + X3^4 + X4^2", &fr)]);
    for b in 1..=3 {
        let g = specialize(&umbrella(b), &[q(1)]).unwrap();
        assert_eq!(g.equations, vec![poly("w^2 - v^3 + v^2", &ring("w v", ""))]);
    }
    let r = ring("x y", "");
    let fam = GermFamily::new(r.clone(), vec![poly("x^2 - y^3", &r)], None, Locus::Section).unwrap();
    assert_eq!(specialize(&fam, &[]).unwrap().equations, fam.equations);
    assert!(specialize(&umbrella(1), &[]).is_err());
}

#[test]
fn specialization_commutes_with_fiber_partials() {
    let hm = quartic_icis();
    let rel = jacobian_module(&hm, JacobianKind::Relative).unwrap();
    for y in [0, 2, -3] {
        let g = specialize(&hm, &[q(y)]).unwrap();
        let on_fiber = jacobian_module(&g, JacobianKind::Relative).unwrap();
        let vals = [(4usize, q(y))];
        let special: Vec<Vec<Polynomial>> =
            rel.gens.iter().map(|c| c.iter().map(|p| p.specialize(&vals)).collect()).collect();
        assert_eq!(on_fiber.gens, special);
        assert!(jacobian_module(&g, JacobianKind::Param).is_err());
    }
}

#[test]
fn branch_fiber_adds_line_parameter() {
    let r = ring("x w", "y");
    let fam = GermFamily::new(r.clone(), vec![poly("(w^2 - y)^2 - x^2", &r)], None, Locus::Branches).unwrap();
    let g = specialize(&fam, &[q(-2)]).unwrap();
    assert!(g.is_branch());
    assert_eq!(g.l(), 2);
    assert_eq!(g.equations[0], poly("(w^2 + 2*s)^2 - x^2", &g.ring));
    assert!(!specialize(&fam, &[q(0)]).unwrap().is_branch());
}
