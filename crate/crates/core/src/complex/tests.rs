use std::collections::BTreeMap;

use super::*;
use crate::ring::GradedPolynomialRing;

fn qc() -> GradedPolynomialRing {
    GradedPolynomialRing::new(vec![("c", 2)]).unwrap()
}

fn qxy() -> GradedPolynomialRing {
    GradedPolynomialRing::new(vec![("x", 2), ("y", 2)]).unwrap()
}

fn w(a: i64, b: i64) -> DegreeWindow {
    DegreeWindow::new(a, b).unwrap()
}

fn koszul_xy() -> FreeComplex {
    let r = qxy();
    let kx = FreeComplex::two_term(&r, &r.var(0)).unwrap();
    let ky = FreeComplex::two_term(&r, &r.var(1)).unwrap();
    kx.tensor(&ky).unwrap()
}

#[test]
fn window_validation() {
    assert!(DegreeWindow::new(3, 2).is_err());
    assert_eq!(w(-2, 2).len(), 5);
}

#[test]
fn unit_homology() {
    let h = FreeComplex::unit(&qc()).homology(w(-4, 4));
    let nz: Vec<_> = h.nonzero().collect();
    assert_eq!(nz, vec![((0, 0), 1), ((0, 2), 1), ((0, 4), 1)]);
}

#[test]
fn unit_is_tensor_identity() {
    let k = koszul_xy();
    let u = FreeComplex::unit(k.ring());
    assert_eq!(u.tensor(&k).unwrap(), k);
    assert_eq!(k.tensor(&u).unwrap(), k);
}

#[test]
fn koszul_tensor_ranks_and_homology() {
    let k = koszul_xy();
    let ranks: Vec<usize> = (0..=2).map(|s| k.term(s).len()).collect();
    assert_eq!(ranks, vec![1, 2, 1]);
    let h = k.homology(w(-10, 10));
    assert_eq!(h.nonzero().collect::<Vec<_>>(), vec![((0, 0), 1)]);
}

#[test]
fn suspension_commutes_with_tensor() {
    let k = koszul_xy();
    let r = k.ring().clone();
    let d = FreeComplex::two_term(&r, &r.var(0).mul(&r.var(1))).unwrap();
    let lhs = k.shift(1, 0).tensor(&d).unwrap();
    let rhs = k.tensor(&d).unwrap().shift(1, 0);
    assert_eq!(lhs, rhs);
}

#[test]
fn hom_from_unit_is_identity() {
    let k = koszul_xy();
    let u = FreeComplex::unit(k.ring());
    assert_eq!(u.hom(&k).unwrap(), k);
    assert!(k.hom(&FreeComplex::zero(k.ring())).unwrap().is_zero());
}

#[test]
fn hom_of_two_term_koszul_is_shifted_koszul() {
    let r = qc();
    let k = FreeComplex::two_term(&r, &r.var(0)).unwrap();
    let dual = k.hom(&FreeComplex::unit(&r)).unwrap();
    // Hom(K(c), A): A in degree 0, Σ^{-2}A in degree -1, d = ±c
    assert_eq!(dual.term(0), &[0]);
    assert_eq!(dual.term(-1), &[-2]);
    let h = dual.homology(w(-6, 6));
    assert_eq!(h.nonzero().collect::<Vec<_>>(), vec![((-1, -2), 1)]);
    // it is K(c) moved to degrees (-1, 0) and internal shift -2
    let shifted = k.shift(-1, -2);
    assert_eq!(shifted.homology(w(-6, 6)), h);
}

#[test]
fn cone_of_identity_is_exact() {
    let k = koszul_xy();
    let c = ChainMap::identity(&k).cone().unwrap();
    assert!(c.homology(w(-8, 8)).is_zero());
}

#[test]
fn cone_from_zero_complex() {
    let k = koszul_xy();
    let z = FreeComplex::zero(k.ring());
    let c = ChainMap::zero(&z, &k).cone().unwrap();
    assert_eq!(c, k);
}

#[test]
fn cone_and_fiber_of_multiplication() {
    let r = qc();
    let u = FreeComplex::unit(&r);
    let f = ChainMap::multiplication(&u, &r.var(0)).unwrap();
    let cone = f.cone().unwrap();
    assert_eq!(cone, FreeComplex::two_term(&r, &r.var(0)).unwrap());
    let h = cone.homology(w(-6, 6));
    assert_eq!(h.nonzero().collect::<Vec<_>>(), vec![((0, 0), 1)]);
    let fib = f.fiber().unwrap();
    let h = fib.homology(w(-6, 6));
    assert_eq!(h.nonzero().collect::<Vec<_>>(), vec![((-1, 0), 1)]);
}

#[test]
fn chain_map_violation_is_reported() {
    let r = qc();
    let k = FreeComplex::two_term(&r, &r.var(0)).unwrap();
    let u = FreeComplex::unit(&r);
    // identity on degree 0 only: d∘f = 0 but f∘d = c in degree 1 -> not a chain map
    let bad = ChainMap::new(
        u.clone(),
        k.clone(),
        BTreeMap::from([(0, PolyMatrix::identity(1, 1))]),
    );
    assert!(bad.is_ok());
    let bad = ChainMap::new(
        k.clone(),
        u.clone(),
        BTreeMap::from([(0, PolyMatrix::identity(1, 1))]),
    );
    assert!(matches!(bad, Err(Error::NotAChainMap { s: 1, .. })));
}

#[test]
fn d_squared_violation_is_reported() {
    let r = qxy();
    let k = koszul_xy();
    let mut diffs = k.differentials().clone();
    let d2 = diffs[&2].clone();
    let flipped: Vec<_> = d2
        .entries()
        .iter()
        .enumerate()
        .map(|(i, (a, b, p))| (*a, *b, if i == 0 { p.neg() } else { p.clone() }))
        .collect();
    diffs.insert(2, PolyMatrix::new(d2.rows(), d2.cols(), flipped));
    let err = FreeComplex::new(r, k.terms().clone(), diffs).unwrap_err();
    assert!(matches!(err, Error::DSquaredNonzero { s: 2, .. }));
}

#[test]
fn euler_characteristic_matches_homology() {
    let k = koszul_xy();
    let win = w(-4, 12);
    let h = k.homology(win);
    for t in win.degrees() {
        let hom: i64 = (0..=2)
            .map(|s| if s % 2 == 0 { 1 } else { -1 } * h.dim(s, t) as i64)
            .sum();
        assert_eq!(k.euler_characteristic(t), hom);
    }
}

#[test]
fn tensor_of_maps_is_chain_map() {
    let r = qxy();
    let k = koszul_xy();
    let f = ChainMap::multiplication(&k, &r.var(0)).unwrap();
    let g = ChainMap::identity(&k);
    let fg = f.tensor(&g).unwrap();
    ChainMap::new(fg.source().clone(), fg.target().clone(), fg.components().clone()).unwrap();
}

#[test]
fn hom_of_maps_is_chain_map() {
    let r = qxy();
    let k = koszul_xy();
    let f = ChainMap::multiplication(&k, &r.var(1)).unwrap();
    let g = ChainMap::multiplication(&k, &r.var(0)).unwrap();
    let h = f.hom(&g).unwrap();
    ChainMap::new(h.source().clone(), h.target().clone(), h.components().clone()).unwrap();
}

#[test]
fn induced_map_ranks() {
    let r = qc();
    let u = FreeComplex::unit(&r);
    let f = ChainMap::multiplication(&u, &r.var(0)).unwrap();
    // c: A_{t-2} -> A_t is injective
    assert_eq!(homology_map_rank(&f, 0, 4), 1);
    assert_eq!(homology_map_rank(&f, 0, 0), 0);
    let id = ChainMap::identity(&koszul_xy());
    assert_eq!(homology_map_rank(&id, 0, 0), 1);
    assert_eq!(homology_map_rank(&id, 0, 2), 0);
}
