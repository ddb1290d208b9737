use kronecker_nc::algebra::{FoliationParams, Kronecker, TimeRegistry};
use kronecker_nc::hilbert::{Assembled, Geometry, ModeIndex};
use kronecker_nc::spectral::*;
use num_complex::Complex64;

fn params() -> FoliationParams {
    FoliationParams::pythagorean(3, 4).unwrap()
}

fn geometry() -> Geometry<Complex64> {
    Geometry::new(Kronecker::new(params(), TimeRegistry::new(&[]).unwrap()).unwrap())
}

fn lattice_points(r2: i64) -> u64 {
    let r = (r2 as f64).sqrt() as i64 + 1;
    let mut n = 0;
    for k in -r..=r {
        for l in -r..=r {
            if k * k + l * l <= r2 {
                n += 1;
            }
        }
    }
    n
}

#[test]
fn residuals_small_window() {
    let reports = eigen_residual_suite(&geometry(), 6, 1e-10, 1e-12);
    for r in &reports {
        assert!(r.passed(), "{r:?}");
    }
}

#[test]
fn three_four_five() {
    let s = linear_spectrum(&params(), 3, 4);
    assert!((s[0].eigenvalue - 5.0).abs() < 1e-14);
    assert_eq!(
        linear_spectrum(&params(), 0, 0)
            .iter()
            .filter(|p| p.eigenvalue == 0.0)
            .count(),
        4
    );
}

#[test]
fn gamma_unimodular_and_basis_det() {
    let p = params();
    for (k, l) in [(1, 0), (2, -3), (-5, 7), (0, 1)] {
        for b in [Branch::Plus, Branch::Minus] {
            assert!((gamma(&p, k, l, b).norm() - 1.0).abs() < 1e-14);
        }
        let want = gamma(&p, k, l, Branch::Plus) * -4.0;
        assert!((change_of_basis_det(&p, k, l) - want).norm() < 1e-13);
    }
}

#[test]
fn kernel_frame() {
    let g = geometry();
    let q = g.assemble(Assembled::Qmixed);
    assert!(q.apply_mode(ModeIndex::new(0, 0, 1)).is_empty());
    let d = dirac_action(&params(), 1, 0, 0, Branch::Plus);
    assert_eq!(d.eigenvalue, 0.0);
    assert!(g.dirac().apply_all(&d.eigenvector).is_empty());
}

#[test]
fn counts_match_gauss_circle() {
    let c = EigenCounter::new(CountedOperator::Qtilde, &params());
    assert_eq!(lattice_points(100), 317);
    assert_eq!(c.count(10.0), 4 * 317);
    for r in [5.0, 7.5, 12.0, 20.0] {
        assert_eq!(c.count(r), 4 * lattice_points((r * r) as i64));
        assert_eq!(c.count(r), c.brute_force(r));
    }
    let d = EigenCounter::new(CountedOperator::Dirac, &params());
    for r in [3.0, 6.5, 11.0, 20.0] {
        assert_eq!(d.count(r), d.brute_force(r), "R = {r}");
    }
    let t = EigenCounter::new(CountedOperator::Torus, &params());
    let s = (2.0 * std::f64::consts::PI).sqrt();
    assert_eq!(t.count(10.0 * s), 2 * 317);
    assert_eq!(t.count(0.9 * s), 2);
}

#[test]
fn dimension_fits() {
    let p = params();
    let q = weyl_count(CountedOperator::Qtilde, &p, 10.0, 200.0, 16);
    assert!((q.exponent - 2.0).abs() < 0.1, "{q:?}");
    let d = weyl_count(CountedOperator::Dirac, &p, 10.0, 100.0, 16);
    assert!((d.exponent - 3.0).abs() < 0.15, "{d:?}");
    assert!(d.counts.windows(2).all(|w| w[0] <= w[1]));
}
