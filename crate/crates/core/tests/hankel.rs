use itertools::Itertools;
use kronecker_nc::algebra::FoliationParams;
use kronecker_nc::exact::{gauss_int, GaussRat};
use kronecker_nc::hankel::*;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use rand::SeedableRng;
use rayon::prelude::*;

fn g(n: i64) -> GaussRat {
    gauss_int(n, 0)
}

fn pow2(i: i64) -> GaussRat {
    kronecker_nc::exact::field_pow(&g(2), i)
}

#[test]
fn worked_determinants() {
    assert!(hankel_det(|i| g(1) + pow2(i), &[0, 1, 2], 2).is_zero());
    assert_eq!(hankel_det(|i| g(i * i), &[0, 1], 1), g(-1));
    let geo = |i: i64| kronecker_nc::exact::field_pow(&gauss_int(3, -2), i) * gauss_int(5, 1);
    for (i, j) in [(-4, 3), (0, 7), (2, 5)] {
        assert!(hankel_det(geo, &[i, j], 1).is_zero());
    }
}

#[test]
fn poly_exp_example_round_trips() {
    let s = SequenceSamples::from_fn(0, 6, 2, |i| pow2(i) * g(1 + i)).unwrap();
    assert_eq!(
        classify(&s),
        Classification::PolyExp {
            beta: g(2),
            alphas: vec![g(1), g(1)]
        }
    );
}

#[test]
fn geometric_ratio_gives_pure_exponential() {
    // f(i₀+l) = f(i₀+1)^l / f(i₀)^{l-1}
    let (f0, f1) = (gauss_int(2, 1), gauss_int(-3, 4));
    let beta = f1.clone() / f0.clone();
    let vals: Vec<GaussRat> = (0..8)
        .map(|l| kronecker_nc::exact::field_pow(&beta, l) * f0.clone())
        .collect();
    match classify(&SequenceSamples::new(0, vals, 3).unwrap()) {
        Classification::PolyExp { beta: b, alphas } => {
            assert_eq!(b, beta);
            assert!(alphas[1..].iter().all(Zero::is_zero));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn planted_models_round_trip() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    for n in 0..100 {
        let k = 1 + n % 3;
        let model = random_model(&mut rng, k);
        let table: Vec<GaussRat> = (-8..=8 + k as i64).map(|i| model.eval(i)).collect();
        let f = |i: i64| table[(i + 8) as usize].clone();
        let tuples: Vec<Vec<i64>> = (-8..=8i64).combinations(k + 1).collect();
        let bad = tuples
            .par_iter()
            .find_any(|rows| !hankel_det(f, rows, k).is_zero());
        assert!(bad.is_none(), "{model:?} {bad:?}");
        let s = SequenceSamples::from_fn(-3, 2 * k + 4, k, |i| model.eval(i)).unwrap();
        assert!(model.matches(&classify(&s)), "{model:?}");
    }
}

#[test]
fn h_is_neither() {
    let p = FoliationParams::pythagorean(3, 4).unwrap();
    for k in 1..=3 {
        let s = SequenceSamples::from_fn(-12, 25, k, |i| h_function(&p, i)).unwrap();
        assert!(classify(&s).is_neither(), "k = {k}");
    }
    let r1 = h_function(&p, 2) / h_function(&p, 1);
    let r2 = h_function(&p, 3) / h_function(&p, 2);
    assert!((r1 - r2).norm() > 1e-3);
    assert!((-100..=100).all(|i| h_function(&p, i).is_finite()));
}

#[test]
fn binomial_identity() {
    for r in 1..=10u32 {
        for s in 0..r {
            assert_eq!(alternating_binomial_sum(r, s), BigInt::zero());
        }
        assert_ne!(alternating_binomial_sum(r, r), BigInt::zero());
    }
}

#[test]
fn small_scans_are_nonzero() {
    let p = FoliationParams::pythagorean(3, 4).unwrap();
    let pairs: Vec<Vec<i64>> = (-10..=10i64).combinations(2).collect();
    assert!(h_scan_tuples(&p, 1, &pairs, 1e-30).passed);
    let consecutive: Vec<Vec<i64>> = (-10..=10).map(|i| vec![i, i + 1, i + 2]).collect();
    assert!(h_scan_tuples(&p, 2, &consecutive, 1e-30).passed);
    assert!(hankel_det(|i| h_function(&p, i), &[3, 3], 1).norm() == 0.0);
}

#[test]
fn numeric_fitter_agrees() {
    let f = |i: i64| {
        Complex64::new(0.5, 0.0).powi(i as i32) * 3.0 + Complex64::new(0.0, 1.5).powi(i as i32)
    };
    match classify(&SequenceSamples::from_fn(0, 8, 3, f).unwrap()) {
        Classification::Exp { terms } => assert_eq!(terms.len(), 2),
        other => panic!("{other:?}"),
    }
    assert!(det_vanishes(f, &[-2, 1, 4], 2));
    assert!(!det_vanishes(
        |i| Complex64::new((i * i) as f64, 0.0),
        &[0, 1],
        1
    ));
}
