//! Closed-form eigen-data of `Q̃`, `Q` and `D`, and eigenvalue counting.
//!
//! Every operator here is diagonal in `(k, l)`, so the spectrum is a union of
//! 4×4 fiber spectra:
//!
//! * `Q̃` has `±λ`, `λ = √((ak+bl)² + (al-bk)²)`, each twice;
//! * `Q` has `±√((ak+bl)⁴ + (al-bk)²)` on the pairs `(1, ν)` and `(τ⊗ν, τ)`;
//! * `D = Q(Q²)^{-1/4}` has the fourth roots with the same eigenvectors.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::FoliationParams;
use crate::exact::int;
use crate::hilbert::{Assembled, Geometry, ModeIndex, SectionVector};
use crate::report::{RelationReport, Status};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        }
    }
}

/// One eigenvalue with its eigenvector.
#[derive(Debug, Clone)]
pub struct SpectralPair {
    pub k: i64,
    pub l: i64,
    pub branch: Branch,
    pub family: u8,
    pub eigenvalue: f64,
    pub eigenvector: SectionVector<Complex64>,
}

/// `(ak+bl, al-bk)` in double precision.
pub fn symbols(p: &FoliationParams, k: i64, l: i64) -> (f64, f64) {
    let (a, b) = (p.a(), p.b());
    (a * k as f64 + b * l as f64, a * l as f64 - b * k as f64)
}

/// `(ak+bl)² + (al-bk)²` in exact arithmetic.
pub fn linear_lambda_squared_exact(p: &FoliationParams, k: i64, l: i64) -> Option<BigRational> {
    let (a, b) = p.exact()?;
    let x = a * int(k) + b * int(l);
    let c = a * int(l) - b * int(k);
    Some(&x * &x + &c * &c)
}

fn vector(k: i64, l: i64, entries: [Complex64; 4]) -> SectionVector<Complex64> {
    SectionVector::from_terms(
        4,
        entries
            .into_iter()
            .enumerate()
            .map(|(i, c)| (ModeIndex::new(k, l, i as u8 + 1), c)),
    )
}

/// Eigen-data of `Q̃` on the fiber `(k, l)`.
pub fn linear_spectrum(p: &FoliationParams, k: i64, l: i64) -> Vec<SpectralPair> {
    let (x, c) = symbols(p, k, l);
    let lam = (x * x + c * c).sqrt();
    let zero = Complex64::zero();
    let one = Complex64::new(1.0, 0.0);
    if k == 0 && l == 0 {
        return (0..4)
            .map(|i| {
                let mut e = [zero; 4];
                e[i] = one;
                SpectralPair {
                    k,
                    l,
                    branch: if i < 2 { Branch::Plus } else { Branch::Minus },
                    family: (i % 2) as u8 + 1,
                    eigenvalue: 0.0,
                    eigenvector: vector(k, l, e),
                }
            })
            .collect();
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let ix = I * (x / lam);
    let ic = I * (c / lam);
    let raw = [
        (Branch::Plus, 1, [-ic, zero, one, ix]),
        (Branch::Plus, 2, [-ix, one, zero, -ic]),
        (Branch::Minus, 1, [one, -ix, -ic, zero]),
        (Branch::Minus, 2, [zero, -ic, ix, one]),
    ];
    raw.into_iter()
        .map(|(branch, family, e)| SpectralPair {
            k,
            l,
            branch,
            family,
            eigenvalue: branch.sign() * lam,
            eigenvector: vector(k, l, e.map(|z| z * s)),
        })
        .collect()
}

/// `λ_{kl+} = √((ak+bl)⁴ + (al-bk)²)`.
pub fn mixed_lambda(p: &FoliationParams, k: i64, l: i64) -> f64 {
    let (x, c) = symbols(p, k, l);
    (x.powi(4) + c * c).sqrt()
}

/// `γ_{kl±} = (-(ak+bl)² + i(al-bk)) / λ_{kl±}`; on the kernel `γ_{00±} = ±1`.
pub fn gamma(p: &FoliationParams, k: i64, l: i64, branch: Branch) -> Complex64 {
    if k == 0 && l == 0 {
        return Complex64::new(branch.sign(), 0.0);
    }
    let (x, c) = symbols(p, k, l);
    Complex64::new(-x * x, c) / (branch.sign() * mixed_lambda(p, k, l))
}

/// `√λ_{kl} γ_{kl+}`, the combination entering the commutator coefficients.
pub fn root_lambda_gamma(p: &FoliationParams, k: i64, l: i64) -> Complex64 {
    if k == 0 && l == 0 {
        return Complex64::zero();
    }
    gamma(p, k, l, Branch::Plus) * mixed_lambda(p, k, l).sqrt()
}

/// `e^{(family)}_{kl±}`: family 1 lives on `(1, ν)`, family 2 on `(τ⊗ν, τ)`.
pub fn mixed_vector(
    p: &FoliationParams,
    family: u8,
    k: i64,
    l: i64,
    branch: Branch,
) -> SectionVector<Complex64> {
    let g = gamma(p, k, l, branch);
    let one = Complex64::new(1.0, 0.0);
    let (hi, lo) = ((g + one) * 0.5, (g - one) * 0.5);
    let z = Complex64::zero();
    match family {
        1 => vector(k, l, [hi, z, lo, z]),
        _ => vector(k, l, [z, lo, z, hi]),
    }
}

/// `η_{kl±} = ½(e_{kl+} ± e_{kl-})`.
pub fn eta(
    p: &FoliationParams,
    family: u8,
    k: i64,
    l: i64,
    branch: Branch,
) -> SectionVector<Complex64> {
    let ep = mixed_vector(p, family, k, l, Branch::Plus);
    let em = mixed_vector(p, family, k, l, Branch::Minus);
    let half = Complex64::new(0.5, 0.0);
    match branch {
        Branch::Plus => ep.plus(&em).scaled(&half),
        Branch::Minus => ep.minus(&em).scaled(&half),
    }
}

/// Eigen-data of `Q` on the fiber `(k, l)`.
pub fn mixed_spectrum(p: &FoliationParams, k: i64, l: i64) -> Vec<SpectralPair> {
    let lam = mixed_lambda(p, k, l);
    let mut out = Vec::new();
    for family in [1u8, 2] {
        for branch in [Branch::Plus, Branch::Minus] {
            out.push(SpectralPair {
                k,
                l,
                branch,
                family,
                eigenvalue: branch.sign() * lam,
                eigenvector: mixed_vector(p, family, k, l, branch),
            });
        }
    }
    out
}

/// `D e^{(f)}_{kl±} = ±√λ_{kl} e^{(f)}_{kl±}`.
pub fn dirac_action(
    p: &FoliationParams,
    family: u8,
    k: i64,
    l: i64,
    branch: Branch,
) -> SpectralPair {
    SpectralPair {
        k,
        l,
        branch,
        family,
        eigenvalue: branch.sign() * mixed_lambda(p, k, l).sqrt(),
        eigenvector: mixed_vector(p, family, k, l, branch),
    }
}

/// `D η_{kl±} = √λ_{kl} η_{kl∓}`.
pub fn dirac_on_eta(
    p: &FoliationParams,
    family: u8,
    k: i64,
    l: i64,
    branch: Branch,
) -> SectionVector<Complex64> {
    eta(p, family, k, l, branch.flip()).scaled(&Complex64::new(mixed_lambda(p, k, l).sqrt(), 0.0))
}

/// Determinant of the rows `(γ₊+1, γ₊-1)`, `(γ₋+1, γ₋-1)`.
pub fn change_of_basis_det(p: &FoliationParams, k: i64, l: i64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let gp = gamma(p, k, l, Branch::Plus);
    let gm = gamma(p, k, l, Branch::Minus);
    (gp + one) * (gm - one) - (gp - one) * (gm + one)
}

fn residual_of(op: &crate::hilbert::BlockOperator<Complex64>, pair: &SpectralPair) -> f64 {
    let env = Default::default();
    let img = op.apply_all(&pair.eigenvector);
    img.minus(
        &pair
            .eigenvector
            .scaled(&Complex64::new(pair.eigenvalue, 0.0)),
    )
    .norm(&env)
}

/// Residuals, orthonormality and completeness of the constructed eigenvectors on `|k|, |l| ≤ n`.
pub fn eigen_residual_suite(
    geo: &Geometry<Complex64>,
    n: i64,
    tol: f64,
    ortho_tol: f64,
) -> Vec<RelationReport> {
    let p = geo.ctx().params().clone();
    let qt = geo.assemble(Assembled::Qtilde);
    let q = geo.assemble(Assembled::Qmixed);
    let d = geo.dirac();
    let dd = d.compose(&geo.abs_dirac());
    let modes: Vec<(i64, i64)> = (-n..=n)
        .flat_map(|k| (-n..=n).map(move |l| (k, l)))
        .collect();
    // (worst residual, witness) per check
    let per_mode: Vec<[(f64, (i64, i64)); 6]> = modes
        .par_iter()
        .map(|&(k, l)| {
            let lin = linear_spectrum(&p, k, l);
            let mixed = mixed_spectrum(&p, k, l);
            let r_lin = lin.iter().map(|s| residual_of(&qt, s)).fold(0.0, f64::max);
            let r_mix = mixed.iter().map(|s| residual_of(&q, s)).fold(0.0, f64::max);
            let mut r_dir: f64 = 0.0;
            let mut r_dd: f64 = 0.0;
            for s in &mixed {
                let pair = dirac_action(&p, s.family, k, l, s.branch);
                r_dir = r_dir.max(residual_of(&d, &pair));
                // D|D| v = λ v = Q v
                r_dd = r_dd.max(residual_of(&dd, s));
                let lhs = dd.apply_all(&s.eigenvector);
                let rhs = q.apply_all(&s.eigenvector);
                r_dd = r_dd.max(lhs.minus(&rhs).norm(&Default::default()));
            }
            let ortho = orthonormality_defect(&lin).max(orthonormality_defect(&mixed));
            let rank = if full_rank(&lin) && full_rank(&mixed) {
                0.0
            } else {
                1.0
            };
            [
                (r_lin, (k, l)),
                (r_mix, (k, l)),
                (r_dir, (k, l)),
                (r_dd, (k, l)),
                (ortho, (k, l)),
                (rank, (k, l)),
            ]
        })
        .collect();
    let names = [
        ("eigen-residual Qtilde", tol),
        ("eigen-residual Q", tol),
        ("eigen-residual D", tol),
        ("D|D| = Q", tol),
        ("orthonormality", ortho_tol),
        ("completeness rank 4", 0.5),
    ];
    names
        .iter()
        .enumerate()
        .map(|(i, (name, t))| {
            let (worst, at) = per_mode.iter().map(|r| r[i]).fold((0.0, (0, 0)), |acc, r| {
                if r.0 > acc.0 {
                    r
                } else {
                    acc
                }
            });
            let status = if worst <= *t {
                Status::WithinTolerance
            } else {
                Status::Violated
            };
            let witness = (status == Status::Violated).then(|| ModeIndex::new(at.0, at.1, 1));
            RelationReport::new(*name, status, worst).with_witness(witness)
        })
        .collect()
}

fn gram(pairs: &[SpectralPair]) -> nalgebra::DMatrix<Complex64> {
    let env = Default::default();
    let n = pairs.len();
    nalgebra::DMatrix::from_fn(n, n, |i, j| {
        pairs[i].eigenvector.inner(&pairs[j].eigenvector, &env)
    })
}

/// `max |⟨v_i, v_j⟩ - δ_ij|`.
pub fn orthonormality_defect(pairs: &[SpectralPair]) -> f64 {
    let g = gram(pairs);
    let n = pairs.len();
    (g - nalgebra::DMatrix::<Complex64>::identity(n, n))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// The eigenvectors span the whole fiber.
pub fn full_rank(pairs: &[SpectralPair]) -> bool {
    let n = pairs.len();
    let m = nalgebra::DMatrix::from_fn(4, n, |r, c| {
        let e = &pairs[c].eigenvector;
        e.get(&ModeIndex::new(pairs[c].k, pairs[c].l, r as u8 + 1))
    });
    m.svd(false, false).rank(1e-10) == 4
}

/// Operators whose eigenvalues are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountedOperator {
    Qtilde,
    Dirac,
    Torus,
}

/// Eigenvalue counts on a radius grid with a power-law fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylCount {
    #[serde(rename = "R")]
    pub radii: Vec<f64>,
    #[serde(rename = "N")]
    pub counts: Vec<u64>,
    pub exponent: f64,
    pub residual: f64,
    /// Fitted `C` in `N(R) ≈ C R^n`.
    pub constant: f64,
}

/// Counts with multiplicity the eigenvalues `μ` of `|op|` with `μ ≤ R`.
pub struct EigenCounter {
    op: CountedOperator,
    a: f64,
    b: f64,
    /// `(p, q, r)` with `a = p/r`, `b = q/r` when exact.
    exact: Option<(i128, i128, i128)>,
}

const REL_SLACK: f64 = 1e-12;

impl EigenCounter {
    pub fn new(op: CountedOperator, params: &FoliationParams) -> Self {
        let exact = params.exact().and_then(|(a, b)| {
            use num_traits::ToPrimitive;
            let r = num_integer::Integer::lcm(a.denom(), b.denom());
            let p = (a * BigRational::from_integer(r.clone()))
                .to_integer()
                .to_i128()?;
            let q = (b * BigRational::from_integer(r.clone()))
                .to_integer()
                .to_i128()?;
            Some((p, q, r.to_i128()?))
        });
        Self {
            op,
            a: params.a(),
            b: params.b(),
            exact,
        }
    }

    pub fn multiplicity(&self) -> u64 {
        match self.op {
            CountedOperator::Qtilde | CountedOperator::Dirac => 4,
            CountedOperator::Torus => 2,
        }
    }

    /// Whether mode `(k, l)` contributes at radius `r`.
    pub fn inside(&self, k: i64, l: i64, r: f64) -> bool {
        let (kf, lf) = (k as f64, l as f64);
        match self.op {
            CountedOperator::Torus => {
                let two_pi = 2.0 * std::f64::consts::PI;
                two_pi * (kf * kf + lf * lf) <= r * r * (1.0 + REL_SLACK)
            }
            CountedOperator::Qtilde => match self.exact {
                Some((p, q, d)) => {
                    let (k, l) = (k as i128, l as i128);
                    let x = p * k + q * l;
                    let c = p * l - q * k;
                    let lhs = (x * x + c * c) as f64;
                    lhs <= (d * d) as f64 * r * r * (1.0 + REL_SLACK)
                }
                None => {
                    let x = self.a * kf + self.b * lf;
                    let c = self.a * lf - self.b * kf;
                    x * x + c * c <= r * r * (1.0 + REL_SLACK)
                }
            },
            CountedOperator::Dirac => match self.exact {
                Some((p, q, d)) => {
                    let (k, l) = (k as i128, l as i128);
                    let x = p * k + q * l;
                    let c = p * l - q * k;
                    // d⁴ (X⁴ + c²) with X, c scaled by d
                    let lhs = (x * x * x * x + d * d * c * c) as f64;
                    lhs <= (d * d * d * d) as f64 * r.powi(4) * (1.0 + REL_SLACK)
                }
                None => {
                    let x = self.a * kf + self.b * lf;
                    let c = self.a * lf - self.b * kf;
                    x.powi(4) + c * c <= r.powi(4) * (1.0 + REL_SLACK)
                }
            },
        }
    }

    fn k_bound(&self, r: f64) -> i64 {
        let r = r * (1.0 + 1e-9);
        match self.op {
            CountedOperator::Qtilde => r.ceil() as i64 + 1,
            CountedOperator::Torus => (r / (2.0 * std::f64::consts::PI).sqrt()).ceil() as i64 + 1,
            // k = aX - bc with |X| ≤ R and |c| ≤ R²
            CountedOperator::Dirac => (self.a.abs() * r + self.b.abs() * r * r).ceil() as i64 + 1,
        }
    }

    /// Real minimizer over `l` of the fiber value for fixed `k`.
    fn l_center(&self, k: i64) -> f64 {
        match self.op {
            CountedOperator::Qtilde | CountedOperator::Torus => 0.0,
            CountedOperator::Dirac => {
                let (a, b, kf) = (self.a, self.b, k as f64);
                let f = |l: f64| (a * kf + b * l).powi(4) + (a * l - b * kf).powi(2);
                let span = kf.abs() * 2.0 + 2.0;
                let (mut lo, mut hi) = (-span, span);
                for _ in 0..200 {
                    let m1 = lo + (hi - lo) / 3.0;
                    let m2 = hi - (hi - lo) / 3.0;
                    if f(m1) < f(m2) {
                        hi = m2;
                    } else {
                        lo = m1;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    /// Number of `l` with `(k, l)` inside; the admissible set is an interval.
    fn count_column(&self, k: i64, r: f64) -> u64 {
        let c = self.l_center(k);
        let start = [c.floor() as i64, c.ceil() as i64]
            .into_iter()
            .find(|&l| self.inside(k, l, r));
        let Some(l0) = start else {
            return 0;
        };
        let edge = |dir: i64| {
            // largest step s with (k, l0 + dir·s) inside
            let (mut good, mut bad) = (0i64, 1i64);
            while self.inside(k, l0 + dir * bad, r) {
                good = bad;
                bad *= 2;
            }
            while bad - good > 1 {
                let mid = (good + bad) / 2;
                if self.inside(k, l0 + dir * mid, r) {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
            good
        };
        (edge(1) + edge(-1) + 1) as u64
    }

    /// `N(R)` including multiplicities.
    pub fn count(&self, r: f64) -> u64 {
        if r < 0.0 {
            return 0;
        }
        let kb = self.k_bound(r);
        let modes: u64 = (-kb..=kb)
            .into_par_iter()
            .map(|k| self.count_column(k, r))
            .sum();
        modes * self.multiplicity()
    }

    /// Box enumeration, used as an independent check of [`Self::count`].
    pub fn brute_force(&self, r: f64) -> u64 {
        let kb = self.k_bound(r);
        // l = bX + ac, so the l-range for the Dirac region is as wide as the k-range
        let lb = match self.op {
            CountedOperator::Dirac => (r + r * r).ceil() as i64 + 1,
            _ => kb,
        };
        let mut n = 0;
        for k in -kb..=kb {
            for l in -lb..=lb {
                if self.inside(k, l, r) {
                    n += 1;
                }
            }
        }
        n * self.multiplicity()
    }
}

/// Geometric grid of `points` radii from `r_min` to `r_max`.
pub fn geometric_grid(r_min: f64, r_max: f64, points: usize) -> Vec<f64> {
    if points < 2 || r_max <= r_min {
        return vec![r_max];
    }
    let ratio = (r_max / r_min).powf(1.0 / (points - 1) as f64);
    (0..points)
        .map(|i| {
            if i + 1 == points {
                r_max
            } else {
                r_min * ratio.powi(i as i32)
            }
        })
        .collect()
}

/// Least-squares fit of `log N = n log R + log C`.
pub fn fit_power_law(radii: &[f64], counts: &[u64]) -> (f64, f64, f64) {
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(counts)
        .filter(|(_, &n)| n > 0)
        .map(|(&r, &n)| (r.ln(), (n as f64).ln()))
        .collect();
    let m = pts.len() as f64;
    if pts.len() < 2 {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let intercept = (sy - slope * sx) / m;
    let rms = (pts
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    (slope, rms, intercept.exp())
}

/// Counts on a geometric grid from `r_min` (at least 10) to `r_max` and fits the growth exponent.
pub fn weyl_count(
    op: CountedOperator,
    params: &FoliationParams,
    r_min: f64,
    r_max: f64,
    points: usize,
) -> WeylCount {
    let counter = EigenCounter::new(op, params);
    let radii = geometric_grid(r_min, r_max, points);
    let counts: Vec<u64> = radii.iter().map(|&r| counter.count(r)).collect();
    let (exponent, residual, constant) = fit_power_law(&radii, &counts);
    WeylCount {
        radii,
        counts,
        exponent,
        residual,
        constant,
    }
}

/// One row of the eigenvalue table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRow {
    pub k: i64,
    pub l: i64,
    pub family: u8,
    pub branch: Branch,
    pub eigenvalue: f64,
}

/// Table operator selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableOperator {
    Linear,
    Mixed,
    Dirac,
    Torus,
}

impl std::str::FromStr for TableOperator {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "linear" => Ok(Self::Linear),
            "mixed" => Ok(Self::Mixed),
            "dirac" => Ok(Self::Dirac),
            "torus" => Ok(Self::Torus),
            other => Err(crate::Error::Parse(format!("unknown operator `{other}`"))),
        }
    }
}

/// All eigenvalues on `|k|, |l| ≤ n`, sorted ascending (ties by mode).
pub fn eigen_table(op: TableOperator, p: &FoliationParams, n: i64) -> Vec<EigenRow> {
    let mut rows = Vec::new();
    for k in -n..=n {
        for l in -n..=n {
            match op {
                TableOperator::Linear => {
                    for s in linear_spectrum(p, k, l) {
                        rows.push(EigenRow {
                            k,
                            l,
                            family: s.family,
                            branch: s.branch,
                            eigenvalue: s.eigenvalue,
                        });
                    }
                }
                TableOperator::Mixed | TableOperator::Dirac => {
                    let lam = mixed_lambda(p, k, l);
                    let mag = if op == TableOperator::Dirac {
                        lam.sqrt()
                    } else {
                        lam
                    };
                    for family in [1, 2] {
                        for branch in [Branch::Plus, Branch::Minus] {
                            let ev = if lam == 0.0 { 0.0 } else { branch.sign() * mag };
                            rows.push(EigenRow {
                                k,
                                l,
                                family,
                                branch,
                                eigenvalue: ev,
                            });
                        }
                    }
                }
                TableOperator::Torus => {
                    let mag = (2.0 * std::f64::consts::PI * ((k * k + l * l) as f64)).sqrt();
                    for branch in [Branch::Plus, Branch::Minus] {
                        let ev = if mag == 0.0 { 0.0 } else { branch.sign() * mag };
                        rows.push(EigenRow {
                            k,
                            l,
                            family: 1,
                            branch,
                            eigenvalue: ev,
                        });
                    }
                }
            }
        }
    }
    rows.sort_by(|x, y| {
        x.eigenvalue
            .total_cmp(&y.eigenvalue)
            .then((x.k, x.l, x.family, x.branch).cmp(&(y.k, y.l, y.family, y.branch)))
    });
    rows
}

pub fn table_csv(rows: &[EigenRow]) -> String {
    let mut s = String::from("k,l,family,branch,eigenvalue\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{:?}\n",
            r.k,
            r.l,
            r.family,
            r.branch.symbol(),
            r.eigenvalue
        ));
    }
    s
}

/// `λ⁺_{kl}² = k² + l²` exactly for all `|k|, |l| ≤ n`.
pub fn linear_lambda_identity(p: &FoliationParams, n: i64) -> Option<RelationReport> {
    p.exact()?;
    let mut worst = None;
    for k in -n..=n {
        for l in -n..=n {
            let lhs = linear_lambda_squared_exact(p, k, l)?;
            if lhs != int(k * k + l * l) && worst.is_none() {
                worst = Some(ModeIndex::new(k, l, 1));
            }
        }
    }
    let ok = worst.is_none();
    Some(
        RelationReport::from_bool(
            "lambda+ = sqrt(k^2+l^2)",
            ok,
            true,
            if ok { 0.0 } else { 1.0 },
        )
        .with_witness(worst),
    )
}

/// Double-precision fallback used when the parameters are not rational.
pub fn linear_lambda_defect(p: &FoliationParams, n: i64) -> f64 {
    let mut worst: f64 = 0.0;
    for k in -n..=n {
        for l in -n..=n {
            let (x, c) = symbols(p, k, l);
            worst = worst.max(((x * x + c * c).sqrt() - ((k * k + l * l) as f64).sqrt()).abs());
        }
    }
    worst
}
