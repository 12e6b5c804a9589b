use cofree::duality::{gamma, idempotence_report, lambda, localize_away};
use cofree::koszul::koszul;
use cofree::{DegreeWindow, FreeComplex, GradedModulePresentation, GradedPolynomialRing};

fn q_c() -> GradedPolynomialRing {
    GradedPolynomialRing::new(vec![("c", 2)]).unwrap()
}

fn w(lo: i64, hi: i64) -> DegreeWindow {
    DegreeWindow::new(lo, hi).unwrap()
}

#[test]
fn gamma_fixes_a_torsion_module() {
    let r = q_c();
    let m = GradedModulePresentation::cyclic(&r, &[r.var(0).pow(3, 1)]).unwrap();
    let g = gamma(&m, w(-10, 10), 16).unwrap();
    let got: Vec<_> = g.homology.nonzero().collect();
    assert_eq!(got, vec![((0, 0), 1), ((0, 2), 1), ((0, 4), 1)]);
    assert!(g.homology.untrusted().is_empty());
}

#[test]
fn localization_of_the_unit_is_the_laurent_ring() {
    let r = q_c();
    let l = localize_away(&FreeComplex::unit(&r), w(-12, 12), 16).unwrap();
    assert!(l.checks_pass());
    for t in -12..=12 {
        assert_eq!(l.homology.dim(0, t), usize::from(t % 2 == 0), "t={t}");
    }
}

#[test]
fn completion_of_a_free_module_is_itself() {
    let r = GradedPolynomialRing::with_degrees(&[2, 4]).unwrap();
    let l = lambda(&FreeComplex::unit(&r), w(0, 16), 16).unwrap();
    for t in 0..=16 {
        assert!(l.homology.is_trusted(0, t));
        assert_eq!(l.homology.dim(0, t), r.dim(t));
    }
    assert!(l.lim1.unwrap().values().all(|v| *v == 0));
}

#[test]
fn gamma_and_lambda_are_idempotent() {
    let r = GradedPolynomialRing::with_degrees(&[2, 2]).unwrap();
    let rep = idempotence_report(&FreeComplex::unit(&r), w(-12, 8), 16).unwrap();
    assert!(rep.gamma_gamma.agrees_with(&rep.gamma));
    assert!(rep.lambda_lambda.agrees_with(&rep.lambda));
}

#[test]
fn koszul_complex_is_already_torsion() {
    let r = GradedPolynomialRing::with_degrees(&[4, 6]).unwrap();
    let k = koszul(&r, 1).complex;
    let g = gamma(&k, w(-20, 20), 8).unwrap();
    assert_eq!(g.homology.nonzero().collect::<Vec<_>>(), vec![((0, 0), 1)]);
}
