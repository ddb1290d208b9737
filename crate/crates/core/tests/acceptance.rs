//! One line per acceptance criterion; exits nonzero when any criterion fails.

use std::time::Instant;

use itertools::Itertools;
use kronecker_nc::algebra::{FoliationParams, Kronecker, TimeRegistry};
use kronecker_nc::calculus::*;
use kronecker_nc::exact::{gauss_int, GaussRat};
use kronecker_nc::hankel::*;
use kronecker_nc::hilbert::Geometry;
use kronecker_nc::report::{RelationReport, Status};
use kronecker_nc::scalar::{Exact, Symbolic};
use kronecker_nc::spectral::*;
use kronecker_nc::torus::*;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use rand::SeedableRng;
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn registry() -> std::sync::Arc<TimeRegistry> {
    TimeRegistry::new(&[("T1", 0.7), ("T2", 1.3)]).unwrap()
}

fn exact_geo() -> Geometry<Exact> {
    let p = FoliationParams::pythagorean(3, 4)
        .unwrap()
        .with_generic(true);
    Geometry::new(Kronecker::new(p, registry()).unwrap())
}

fn symbolic_geo() -> Geometry<Symbolic> {
    let p = FoliationParams::numeric(0.6, 0.8)
        .unwrap()
        .with_generic(true);
    Geometry::new(Kronecker::new(p, registry()).unwrap())
}

fn numeric_geo() -> Geometry<Complex64> {
    let p = FoliationParams::pythagorean(3, 4).unwrap();
    Geometry::new(Kronecker::new(p, TimeRegistry::new(&[]).unwrap()).unwrap())
}

fn torus() -> TorusGeometry<Exact> {
    TorusGeometry::new(TorusParams::new(0.618_033_988_749_894_9).unwrap())
}

/// Leibniz consistency is a tolerance check; every other relation must be exact when `want_exact`.
fn first_failure(reports: &[RelationReport], want_exact: bool) -> Option<&RelationReport> {
    reports.iter().find(|r| {
        let exact_required = want_exact && !r.id.starts_with("Leibniz");
        if exact_required {
            r.status != Status::Exact
        } else {
            !r.passed()
        }
    })
}

fn relation_suite<S: kronecker_nc::scalar::Scalar>(geo: &Geometry<S>) -> Vec<RelationReport> {
    let mut out = check_algebra_relations(geo, 3, 1e-12).unwrap();
    out.extend(check_linear_relations(geo, 3, 1e-12, 7).unwrap());
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut reports = relation_suite(&exact_geo());
    reports.extend(check_dirac_relations(&symbolic_geo(), 3, 1e-10, 7).unwrap());
    reports.extend(torus_relation_suite(&torus(), 3, 1e-12));
    let secs = start.elapsed().as_secs_f64();
    match first_failure(&reports, true) {
        Some(r) => outcome(
            false,
            format!(
                "{} is {:?} (residual {:.2e})",
                r.id, r.status, r.max_residual
            ),
        ),
        None => {
            let exact = reports.iter().filter(|r| r.status == Status::Exact).count();
            outcome(
                secs < 10.0,
                format!(
                    "{exact} of {} relations exact, Leibniz checks within 1e-10, in {secs:.2} s",
                    reports.len()
                ),
            )
        }
    }
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let reports = eigen_residual_suite(&numeric_geo(), 20, 1e-10, 1e-12);
    let t = torus_residual(20);
    let secs = start.elapsed().as_secs_f64();
    let worst = reports
        .iter()
        .filter(|r| r.id.starts_with("eigen") || r.id.starts_with("D|D|"))
        .map(|r| r.max_residual)
        .fold(t, f64::max);
    match first_failure(&reports, false) {
        Some(r) => outcome(
            false,
            format!(
                "{} residual {:.2e} at {:?}",
                r.id, r.max_residual, r.witness
            ),
        ),
        None => outcome(
            t <= 1e-10 && secs < 30.0,
            format!("max residual {worst:.2e} (torus {t:.2e}) in {secs:.2} s"),
        ),
    }
}

fn criterion_3() -> Outcome {
    let p = FoliationParams::pythagorean(3, 4).unwrap();
    match linear_lambda_identity(&p, 50) {
        Some(r) => outcome(
            r.status == Status::Exact,
            format!("{} over |k|,|l| ≤ 50: {:?}", r.id, r.status),
        ),
        None => outcome(false, "parameters are not rational"),
    }
}

fn criterion_4() -> Outcome {
    let p = FoliationParams::pythagorean(3, 4).unwrap();
    let c = EigenCounter::new(CountedOperator::Qtilde, &p);
    let (n10, brute) = (c.count(10.0), c.brute_force(10.0));
    let timed = |f: &dyn Fn() -> WeylCount| {
        let s = Instant::now();
        let w = f();
        (w, s.elapsed().as_secs_f64())
    };
    let (q, tq) = timed(&|| weyl_count(CountedOperator::Qtilde, &p, 10.0, 200.0, 16));
    let (d, td) = timed(&|| weyl_count(CountedOperator::Dirac, &p, 10.0, 100.0, 16));
    let root = (2.0 * std::f64::consts::PI).sqrt();
    let (t, tt) = timed(&|| torus_dimension(10.0 * root, 200.0 * root, 16));
    let pass = n10 == 1268
        && brute == 1268
        && (q.exponent - 2.0).abs() <= 0.1
        && (d.exponent - 3.0).abs() <= 0.15
        && (t.exponent - 2.0).abs() <= 0.1
        && [tq, td, tt].iter().all(|s| *s < 60.0);
    outcome(
        pass,
        format!(
            "N(10) = {n10} (brute force {brute}); dims Qtilde {:.3} ({tq:.1} s), D {:.3} ({td:.1} s), torus {:.3} ({tt:.1} s)",
            q.exponent, d.exponent, t.exponent
        ),
    )
}

fn criterion_5() -> Outcome {
    let g = exact_geo();
    let lin = check_linear_relations(&g, 3, 1e-12, 7).unwrap();
    let squares: Vec<&RelationReport> = lin.iter().filter(|r| r.id.contains("^2 = -U")).collect();
    let two = freeness_omega2(&g, 50, 2, 11).unwrap();
    let higher = higher_degree_vanishing(&g, 200, 1, 5).unwrap();
    let pass = !squares.is_empty()
        && squares.iter().all(|r| r.status == Status::Exact)
        && two.status == Status::Exact
        && higher.status == Status::Exact;
    outcome(
        pass,
        format!(
            "{} square relations {:?}; 50 two-form samples {:?}; 200 words {:?}",
            squares.len(),
            squares.iter().map(|r| r.status).collect::<Vec<_>>(),
            two.status,
            higher.status
        ),
    )
}

fn criterion_6() -> Outcome {
    let g = exact_geo();
    let p = FoliationParams::pythagorean(3, 4).unwrap();
    let one = freeness_omega1(&g, 3, 2).unwrap();
    let scans = h_scan(&p, 3, 20, 200, 17, 1e-6);
    let probes: Vec<ProbeReport> = (1..=3)
        .cartesian_product(0..=3)
        .map(|(s, q)| coefficient_probe(&p, s, q, 1..=10, 1e-8))
        .collect();
    let mut lines = vec![format!("unit-modulus dets {:?}", one.status)];
    for s in &scans {
        lines.push(format!(
            "h order {} min |det| {:.3e} at {:?}",
            s.k, s.min_abs_det, s.witness
        ));
    }
    for r in probes.iter().filter(|r| !r.passed) {
        lines.push(format!(
            "(s,q)=({},{}) min |det| {:.3e}",
            r.s, r.q, r.min_abs_det
        ));
    }
    let pass = one.status == Status::Exact
        && scans.iter().all(|s| s.passed)
        && probes.iter().all(|r| r.passed);
    outcome(pass, lines.join("; "))
}

fn criterion_7() -> Outcome {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let models: Vec<PlantedModel> = (0..100)
        .map(|n| random_model(&mut rng, 1 + n % 3))
        .collect();
    let planted_ok = models.par_iter().all(|m| {
        let k = m.order();
        let table: Vec<GaussRat> = (-8..=8 + k as i64).map(|i| m.eval(i)).collect();
        let f = |i: i64| table[(i + 8) as usize].clone();
        let vanish = (-8..=8i64)
            .combinations(k + 1)
            .all(|rows| hankel_det(f, &rows, k).is_zero());
        let s = SequenceSamples::from_fn(-3, 2 * k + 4, k, |i| m.eval(i)).unwrap();
        vanish && m.matches(&classify(&s))
    });
    let p = FoliationParams::pythagorean(3, 4).unwrap();
    let h_neither = (1..=3).all(|k| {
        classify(&SequenceSamples::from_fn(-12, 25, k, |i| h_function(&p, i)).unwrap()).is_neither()
    });
    let binom =
        (1..=10u32).all(|r| (0..r).all(|s| alternating_binomial_sum(r, s) == BigInt::zero()));
    outcome(
        planted_ok && h_neither && binom,
        format!("100 planted models recovered: {planted_ok}; h neither for k ≤ 3: {h_neither}; binomial identity: {binom}"),
    )
}

fn criterion_8() -> Outcome {
    let reports = relation_suite(&exact_geo().tampered());
    let caught = reports.iter().find(|r| !r.passed() && r.witness.is_some());
    let det = hankel_det(|i| gauss_int(i * i, 0), &[0, 1], 1);
    let pass = caught.is_some() && det == gauss_int(-1, 0);
    let what = caught.map_or("nothing".to_string(), |r| {
        format!("{} at {}", r.id, r.witness.unwrap())
    });
    outcome(
        pass,
        format!("tampered operator fails {what}; order-1 det of i² = {det}"),
    )
}

fn main() {
    let criteria: [(u8, fn() -> Outcome); 8] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
    ];
    let mut failed = 0;
    for (n, f) in criteria {
        let o = f();
        println!(
            "criterion {n}: {} - {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
