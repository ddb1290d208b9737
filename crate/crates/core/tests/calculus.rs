use kronecker_nc::algebra::{FoliationParams, Kronecker, Mode, TimeRegistry};
use kronecker_nc::calculus::*;
use kronecker_nc::hilbert::Geometry;
use kronecker_nc::report::Status;
use kronecker_nc::scalar::{Exact, Symbolic};
use num_complex::Complex64;

fn params() -> FoliationParams {
    FoliationParams::pythagorean(3, 4)
        .unwrap()
        .with_generic(true)
}

fn registry() -> std::sync::Arc<TimeRegistry> {
    TimeRegistry::new(&[("T1", 0.7), ("T2", 1.3)]).unwrap()
}

fn exact_geo() -> Geometry<Exact> {
    Geometry::new(Kronecker::new(params(), registry()).unwrap())
}

fn symbolic_geo() -> Geometry<Symbolic> {
    let p = FoliationParams::numeric(0.6, 0.8)
        .unwrap()
        .with_generic(true);
    Geometry::new(Kronecker::new(p, registry()).unwrap())
}

fn numeric_geo() -> Geometry<Complex64> {
    let p = FoliationParams::numeric(0.6, 0.8)
        .unwrap()
        .with_mode(Mode::Numeric)
        .unwrap();
    Geometry::new(Kronecker::new(p, registry()).unwrap())
}

#[test]
fn algebra_relations_are_exact() {
    for r in check_algebra_relations(&exact_geo(), 3, 1e-12).unwrap() {
        assert_eq!(r.status, Status::Exact, "{r:?}");
    }
}

#[test]
fn linear_relations_are_exact() {
    for r in check_linear_relations(&exact_geo(), 3, 1e-12, 7).unwrap() {
        assert_eq!(r.status, Status::Exact, "{r:?}");
    }
}

#[test]
fn dirac_relations_are_exact_with_formal_phases() {
    for r in check_dirac_relations(&symbolic_geo(), 3, 1e-10, 7).unwrap() {
        println!("{} {:?} {:e}", r.id, r.status, r.max_residual);
        assert!(r.passed(), "{r:?}");
    }
}

#[test]
fn first_order_determinants_have_unit_modulus() {
    let rep = freeness_omega1(&exact_geo(), 2, 2).unwrap();
    println!("{rep:?}");
    assert_eq!(rep.status, Status::Exact);
}

#[test]
fn two_forms_separate_from_algebra() {
    let rep = freeness_omega2(&exact_geo(), 50, 2, 11).unwrap();
    assert_eq!(rep.status, Status::Exact, "{rep:?}");
}

#[test]
fn higher_forms_vanish() {
    let rep = higher_degree_vanishing(&exact_geo(), 200, 1, 5).unwrap();
    println!("{rep:?}");
    assert_eq!(rep.status, Status::Exact);
}

#[test]
fn dirac_table_matches_operators() {
    let rep = dirac_table_report(&numeric_geo(), 1, 3, 1e-10).unwrap();
    println!("{rep:?}");
    assert!(rep.passed());
}

#[test]
fn coefficient_probe_small() {
    let p = FoliationParams::pythagorean(3, 4).unwrap();
    let r = coefficient_probe(&p, 1, 1, 1..=10, 1e-8);
    println!("{r:?}");
    assert!((r.min_abs_det - 1.447).abs() < 1e-3);
    let r = coefficient_probe(&p, 2, 0, 1..=3, 1e-8);
    println!("{r:?}");
}
