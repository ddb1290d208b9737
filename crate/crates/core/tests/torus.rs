use kronecker_nc::hilbert::{BlockOperator, ModeIndex};
use kronecker_nc::report::Status;
use kronecker_nc::scalar::{Exact, Symbolic};
use kronecker_nc::torus::*;
use num_complex::Complex64;

const THETA: f64 = 0.618_033_988_749_894_9;

fn exact() -> TorusGeometry<Exact> {
    TorusGeometry::new(TorusParams::new(THETA).unwrap())
}

#[test]
fn relation_suite_is_exact() {
    for r in full_torus_suite(&exact(), 3, 1e-12, 3) {
        assert_eq!(r.status, Status::Exact, "{r:?}");
    }
}

#[test]
fn symbolic_and_numeric_modes_agree() {
    let s = TorusGeometry::<Symbolic>::new(TorusParams::new(THETA).unwrap());
    assert!(full_torus_suite(&s, 2, 1e-10, 4).iter().all(|r| r.passed()));
    let n = TorusGeometry::<Complex64>::new(TorusParams::new(THETA).unwrap());
    for r in full_torus_suite(&n, 2, 1e-10, 4) {
        assert!(r.passed(), "{r:?}");
    }
}

#[test]
fn commutator_with_u_matches_closed_form() {
    // [D,U] e^±_{kl} = ±i√(2π) e^∓_{k+1,l}
    let g = TorusGeometry::<Complex64>::new(TorusParams::new(THETA).unwrap());
    let du = g.d(&g.u(1));
    let root = (2.0 * std::f64::consts::PI).sqrt();
    for (k, l) in [(0, 0), (2, -1), (-3, 4)] {
        let img = du.apply_mode(ModeIndex::new(k, l, 1));
        assert!((img.get(&ModeIndex::new(k + 1, l, 2)) - Complex64::new(0.0, root)).norm() < 1e-12);
        let img = du.apply_mode(ModeIndex::new(k, l, 2));
        assert!(
            (img.get(&ModeIndex::new(k + 1, l, 1)) - Complex64::new(0.0, -root)).norm() < 1e-12
        );
        // [D,V] e^±_{kl} = e^{2πikθ}√(2π) e^∓_{k,l+1}
        let dv = g.d(&g.v(1));
        let ph = Complex64::from_polar(root, 2.0 * std::f64::consts::PI * k as f64 * THETA);
        let img = dv.apply_mode(ModeIndex::new(k, l, 1));
        assert!((img.get(&ModeIndex::new(k, l + 1, 2)) - ph).norm() < 1e-12);
    }
}

#[test]
fn literal_sign_variants_fail() {
    // the forms `u dv = e^{-2πiθ} du v` and `du dv = -e^{2πiθ} dv du` do not hold for these operators
    let g = exact();
    let env = g.env().clone();
    let pr: Vec<ModeIndex> = kronecker_nc::hilbert::Window::new(2).modes(2);
    let (pu, pv) = (g.op_u(), g.op_v());
    let (du, dv) = (g.d(&g.u(1)), g.d(&g.v(1)));
    let r = kronecker_nc::hilbert::check_equal(
        "",
        &pu.compose(&dv),
        &du.compose(&pv).scale(&g.phase(-1)),
        &pr,
        &env,
        1e-9,
    );
    assert_eq!(r.status, Status::Violated);
    let neg = -g.phase(1);
    let r = kronecker_nc::hilbert::check_equal(
        "",
        &du.compose(&dv),
        &dv.compose(&du).scale(&neg),
        &pr,
        &env,
        1e-9,
    );
    assert_eq!(r.status, Status::Violated);
}

#[test]
fn eigenvectors_and_counts() {
    assert!(torus_residual(20) < 1e-10);
    let w = torus_dimension(
        10.0 * (2.0 * std::f64::consts::PI).sqrt(),
        200.0 * (2.0 * std::f64::consts::PI).sqrt(),
        12,
    );
    assert_eq!(w.counts[0], 2 * 317);
    assert!((w.exponent - 2.0).abs() < 0.1, "{}", w.exponent);
    let small = torus_dimension(0.5, 10.0, 3);
    assert_eq!(small.counts[0], 2);
}

#[test]
fn algebra_product_is_associative_and_star_reverses() {
    use rand::SeedableRng;
    let g = exact();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    for _ in 0..30 {
        let x = random_torus_element(&g, &mut rng);
        let y = random_torus_element(&g, &mut rng);
        let z = random_torus_element(&g, &mut rng);
        assert_eq!(
            g.multiply(&g.multiply(&x, &y), &z),
            g.multiply(&x, &g.multiply(&y, &z))
        );
        assert_eq!(
            g.star(&g.multiply(&x, &y)),
            g.multiply(&g.star(&y), &g.star(&x))
        );
        let lhs = g.represent(&g.multiply(&x, &y));
        let rhs = g.represent(&x).compose(&g.represent(&y));
        let pr: Vec<ModeIndex> = kronecker_nc::hilbert::Window::new(2).modes(2);
        let r = kronecker_nc::hilbert::check_equal("rep", &lhs, &rhs, &pr, g.env(), 0.0);
        assert_eq!(r.status, Status::Exact);
    }
    let _ = BlockOperator::<Exact>::identity(2);
}

#[test]
fn tampered_dirac_fails_with_witness() {
    let g = exact().tampered();
    let reps = torus_relation_suite(&g, 2, 1e-12);
    let bad: Vec<_> = reps.iter().filter(|r| !r.passed()).collect();
    assert!(!bad.is_empty());
    assert!(bad.iter().all(|r| r.witness.is_some()));
}
