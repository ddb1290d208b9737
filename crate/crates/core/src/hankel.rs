//! Hankel-type determinants, exponential-polynomial sequence fitting, and the
//! nonvanishing scan for the commutator function `h`.
//!
//! A sequence has vanishing Hankel determinants of order `k` exactly when it
//! satisfies a linear recurrence of order `≤ k`; its characteristic roots then
//! decide between `β^i Σ α_j i^j` (one root) and `Σ α_j β_j^i` (simple roots).

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::FoliationParams;
use crate::exact::{binomial, determinant, field_pow, rationalize, solve, Field, GaussRat};
use crate::precise::{HpComplex, HpReal};

/// `det [f(i_p + q)]_{p,q=0..k}`.
pub fn hankel_det<F: Field>(f: impl Fn(i64) -> F, rows: &[i64], k: usize) -> F {
    assert_eq!(rows.len(), k + 1, "need k+1 row indices");
    let m: Vec<Vec<F>> = rows
        .iter()
        .map(|&i| (0..=k as i64).map(|q| f(i + q)).collect())
        .collect();
    determinant(&m)
}

/// Consecutive samples `f(i₀), f(i₀+1), …`.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSamples<F> {
    pub base: i64,
    pub values: Vec<F>,
    /// Largest model order tried.
    pub order: usize,
}

impl<F: Field> SequenceSamples<F> {
    /// At least `2·order` values are required; extra values are used for verification.
    pub fn new(base: i64, values: Vec<F>, order: usize) -> crate::Result<Self> {
        if order == 0 || values.len() < 2 * order {
            return Err(crate::Error::Precondition(format!(
                "{} samples do not determine a model of order {order}",
                values.len()
            )));
        }
        Ok(Self {
            base,
            values,
            order,
        })
    }

    pub fn from_fn(
        base: i64,
        len: usize,
        order: usize,
        f: impl Fn(i64) -> F,
    ) -> crate::Result<Self> {
        Self::new(base, (0..len as i64).map(|j| f(base + j)).collect(), order)
    }
}

/// Outcome of fitting.
#[derive(Debug, Clone, PartialEq)]
pub enum Classification<F> {
    /// `β^i Σ_{j<k} α_j i^j`.
    PolyExp {
        beta: F,
        alphas: Vec<F>,
    },
    /// `Σ α_j β_j^i` with distinct `β_j`.
    Exp {
        terms: Vec<(F, F)>,
    },
    Neither {
        reason: String,
    },
}

impl<F> Classification<F> {
    pub fn is_neither(&self) -> bool {
        matches!(self, Classification::Neither { .. })
    }
}

/// Arithmetic needed by the fitter on top of [`Field`].
pub trait SampleField: Field + PartialEq {
    /// Exact arithmetic: comparisons are equalities.
    const EXACT: bool;
    fn to_c64(&self) -> Complex64;
    /// Snaps a numeric root to the field; exact fields may refuse.
    fn from_root(z: Complex64) -> Option<Self>;
    fn from_i64(n: i64) -> Self;
}

impl SampleField for GaussRat {
    const EXACT: bool = true;
    fn to_c64(&self) -> Complex64 {
        crate::exact::gauss_to_c64(self)
    }
    fn from_root(z: Complex64) -> Option<Self> {
        let den = 1_000_000;
        Some(GaussRat::new(
            rationalize(z.re, den)?,
            rationalize(z.im, den)?,
        ))
    }
    fn from_i64(n: i64) -> Self {
        crate::exact::gauss_int(n, 0)
    }
}

impl SampleField for Complex64 {
    const EXACT: bool = false;
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn from_root(z: Complex64) -> Option<Self> {
        Some(z)
    }
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
}

/// Relative tolerance for numeric vanishing.
pub const NUMERIC_TOL: f64 = 1e-9;

fn negligible<F: SampleField>(x: &F, scale: f64) -> bool {
    if F::EXACT {
        x.is_zero()
    } else {
        x.to_c64().norm() <= NUMERIC_TOL * scale.max(f64::MIN_POSITIVE)
    }
}

fn scale_of<F: SampleField>(values: &[F]) -> f64 {
    values.iter().map(|v| v.to_c64().norm()).fold(0.0, f64::max)
}

/// Order-`d` recurrence coefficients `c` with `f(i+d) = Σ c_j f(i+j)`, verified on all samples.
fn recurrence<F: SampleField>(s: &SequenceSamples<F>, d: usize) -> Option<Vec<F>> {
    let v = &s.values;
    if v.len() < 2 * d {
        return None;
    }
    let h: Vec<Vec<F>> = (0..d)
        .map(|r| (0..d).map(|j| v[r + j].clone()).collect())
        .collect();
    let rhs: Vec<F> = (0..d).map(|r| v[r + d].clone()).collect();
    let c = solve(&h, &rhs)?;
    let scale = scale_of(v) * (1.0 + c.iter().map(|x| x.to_c64().norm()).sum::<f64>());
    for i in 0..v.len() - d {
        let mut pred = F::zero();
        for (j, cj) in c.iter().enumerate() {
            pred = pred + cj.clone() * v[i + j].clone();
        }
        if !negligible(&(v[i + d].clone() - pred), scale) {
            return None;
        }
    }
    Some(c)
}

/// Roots of `x^d - Σ c_j x^j` from the companion matrix.
fn companion_roots(c: &[Complex64]) -> Vec<Complex64> {
    let d = c.len();
    if d == 1 {
        return vec![c[0]];
    }
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for j in 0..d {
        m[(j, d - 1)] = c[j];
    }
    let t = m.schur().unpack().1;
    (0..d).map(|i| t[(i, i)]).collect()
}

/// Groups numeric roots into `(representative, multiplicity)`.
fn cluster(roots: &[Complex64], scale: f64) -> Vec<(Complex64, usize)> {
    // multiple roots split by about eps^{1/m}; 1e-4 separates them at these orders
    let tol = 1e-4 * scale.max(1.0);
    let mut groups: Vec<(Complex64, usize, Complex64)> = Vec::new();
    for &z in roots {
        match groups.iter_mut().find(|g| (g.0 - z).norm() <= tol) {
            Some(g) => {
                g.1 += 1;
                g.2 += z;
                g.0 = g.2 / g.1 as f64;
            }
            None => groups.push((z, 1, z)),
        }
    }
    groups.into_iter().map(|g| (g.0, g.1)).collect()
}

/// Exact check that `β` is a root of multiplicity `≥ m` of `x^d - Σ c_j x^j`.
fn check_root<F: SampleField>(c: &[F], beta: &F, m: usize) -> bool {
    // coefficients of the monic polynomial, low degree first
    let mut p: Vec<F> = c.iter().map(|x| -x.clone()).collect();
    p.push(F::one());
    let scale = 1.0 + c.iter().map(|x| x.to_c64().norm()).sum::<f64>();
    for _ in 0..m {
        // synthetic division by (x - β)
        let n = p.len();
        if n < 2 {
            return false;
        }
        let mut q = vec![F::zero(); n - 1];
        let mut acc = F::zero();
        for i in (1..n).rev() {
            acc = acc * beta.clone() + p[i].clone();
            q[i - 1] = acc.clone();
        }
        let rem = acc * beta.clone() + p[0].clone();
        let bscale = scale * (1.0 + beta.to_c64().norm()).powi(n as i32);
        if !negligible(&rem, bscale) {
            return false;
        }
        p = q;
    }
    true
}

fn int_pow<F: SampleField>(i: i64, j: usize) -> F {
    // 0^0 = 1
    let mut acc = F::one();
    for _ in 0..j {
        acc = acc * F::from_i64(i);
    }
    acc
}

/// Solves for the amplitudes of a given basis and verifies on every sample.
fn fit_amplitudes<F: SampleField>(
    s: &SequenceSamples<F>,
    basis: &[Box<dyn Fn(i64) -> F>],
) -> Option<Vec<F>> {
    let d = basis.len();
    let a: Vec<Vec<F>> = (0..d)
        .map(|r| basis.iter().map(|b| b(s.base + r as i64)).collect())
        .collect();
    let rhs: Vec<F> = s.values[..d].to_vec();
    let alpha = solve(&a, &rhs)?;
    let scale = scale_of(&s.values) * (1.0 + alpha.iter().map(|x| x.to_c64().norm()).sum::<f64>());
    for (j, v) in s.values.iter().enumerate() {
        let i = s.base + j as i64;
        let mut pred = F::zero();
        for (al, b) in alpha.iter().zip(basis) {
            pred = pred + al.clone() * b(i);
        }
        if !negligible(&(v.clone() - pred), scale) {
            return None;
        }
    }
    Some(alpha)
}

/// Fits the sequence with the smallest order `≤ samples.order`.
pub fn classify<F: SampleField + Send + Sync + 'static>(
    s: &SequenceSamples<F>,
) -> Classification<F> {
    if s.values.iter().all(|v| v.is_zero()) {
        return Classification::Exp { terms: Vec::new() };
    }
    let Some((d, c)) = (1..=s.order).find_map(|d| recurrence(s, d).map(|c| (d, c))) else {
        return Classification::Neither {
            reason: format!("no linear recurrence of order ≤ {}", s.order),
        };
    };
    let cnum: Vec<Complex64> = c.iter().map(|x| x.to_c64()).collect();
    let roots = companion_roots(&cnum);
    let rscale = roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let groups = cluster(&roots, rscale);
    let mut snapped = Vec::new();
    for (z, m) in &groups {
        let Some(beta) = F::from_root(*z) else {
            return Classification::Neither {
                reason: format!("root {z} not representable"),
            };
        };
        if !check_root(&c, &beta, *m) {
            return Classification::Neither {
                reason: format!("root {z} does not verify"),
            };
        }
        if negligible(&beta, rscale.max(1.0)) {
            return Classification::Neither {
                reason: "zero characteristic root".into(),
            };
        }
        snapped.push((beta, *m));
    }
    let base = s.base;
    if snapped.len() == 1 {
        let beta = snapped[0].0.clone();
        let basis: Vec<Box<dyn Fn(i64) -> F>> = (0..d)
            .map(|j| {
                let b = beta.clone();
                Box::new(move |i: i64| field_pow(&b, i) * int_pow::<F>(i, j))
                    as Box<dyn Fn(i64) -> F>
            })
            .collect();
        return match fit_amplitudes(s, &basis) {
            Some(mut alphas) => {
                alphas.resize(s.order, F::zero());
                Classification::PolyExp { beta, alphas }
            }
            None => Classification::Neither {
                reason: "amplitudes do not verify".into(),
            },
        };
    }
    if snapped.iter().all(|(_, m)| *m == 1) {
        let basis: Vec<Box<dyn Fn(i64) -> F>> = snapped
            .iter()
            .map(|(b, _)| {
                let b = b.clone();
                Box::new(move |i: i64| field_pow(&b, i)) as Box<dyn Fn(i64) -> F>
            })
            .collect();
        return match fit_amplitudes(s, &basis) {
            Some(alphas) => Classification::Exp {
                terms: alphas
                    .into_iter()
                    .zip(snapped.into_iter().map(|(b, _)| b))
                    .collect(),
            },
            None => Classification::Neither {
                reason: "amplitudes do not verify".into(),
            },
        };
    }
    let _ = base;
    Classification::Neither {
        reason: "recurrence has a repeated root together with other roots".into(),
    }
}

/// `Σ_{j=0}^{r} (-1)^j C(r,j) j^s`.
pub fn alternating_binomial_sum(r: u32, s: u32) -> BigInt {
    let mut acc = BigInt::zero();
    for j in 0..=r {
        let term = binomial(r, j) * num_traits::pow(BigInt::from(j), s as usize);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// `a` and `b` as high-precision reals.
fn hp_params(p: &FoliationParams) -> (HpReal, HpReal) {
    match p.exact() {
        Some((a, b)) => (HpReal::from_rational(a), HpReal::from_rational(b)),
        None => (
            HpReal::from_rational(&BigRational::from_float(p.a()).unwrap_or_else(BigRational::one)),
            HpReal::from_rational(
                &BigRational::from_float(p.b()).unwrap_or_else(BigRational::zero),
            ),
        ),
    }
}

/// `√λ_{kl} γ_{kl+} = (-(ak+bl)² + i(al-bk)) / λ^{1/2}`, `λ = ((ak+bl)⁴ + (al-bk)²)^{1/2}`, zero at the origin.
pub fn root_lambda_gamma_hp(p: &FoliationParams, k: i64, l: i64) -> HpComplex {
    if k == 0 && l == 0 {
        return HpComplex::zero();
    }
    let (a, b) = hp_params(p);
    let (kk, ll) = (HpReal::from_i64(k), HpReal::from_i64(l));
    let x = a.clone() * kk.clone() + b.clone() * ll.clone();
    let c = a * ll - b * kk;
    let x2 = x.clone() * x;
    let lam = (x2.clone() * x2.clone() + c.clone() * c.clone()).sqrt();
    let root = lam.sqrt();
    HpComplex::new(-x2 / root.clone(), c / root)
}

/// `h(i) = √λ_{i0}γ_{i0} - √λ_{i-1,0}γ_{i-1,0}`.
pub fn h_function(p: &FoliationParams, i: i64) -> Complex64 {
    crate::spectral::root_lambda_gamma(p, i, 0) - crate::spectral::root_lambda_gamma(p, i - 1, 0)
}

pub fn h_function_hp(p: &FoliationParams, i: i64) -> HpComplex {
    root_lambda_gamma_hp(p, i, 0) - root_lambda_gamma_hp(p, i - 1, 0)
}

/// Result of scanning Hankel determinants of `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub k: usize,
    pub tuples: usize,
    /// `log10` of the smallest `|det|`.
    pub min_log10_abs_det: f64,
    pub min_abs_det: f64,
    pub witness: Vec<i64>,
    pub threshold: f64,
    pub passed: bool,
}

/// Row tuples: all consecutive windows `i₀..i₀+k` with `|i₀| ≤ range`, plus
/// `random` sorted tuples of distinct indices from `[-range, range]`.
pub fn row_tuples(k: usize, range: i64, random: usize, seed: u64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = (-range..=range)
        .map(|i0| (0..=k as i64).map(|q| i0 + q).collect())
        .collect();
    let pool: Vec<i64> = (-range..=range).collect();
    if pool.len() > k {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (k as u64).wrapping_mul(0x9e37_79b9));
        for _ in 0..random {
            let mut t: Vec<i64> = pool.choose_multiple(&mut rng, k + 1).copied().collect();
            t.sort_unstable();
            out.push(t);
        }
    }
    out
}

/// Minimum `|det [h(i_p+q)]|` over the given tuples, in 512-bit arithmetic.
pub fn h_scan_tuples(
    p: &FoliationParams,
    k: usize,
    tuples: &[Vec<i64>],
    threshold: f64,
) -> ScanReport {
    let lo = tuples.iter().flatten().min().copied().unwrap_or(0);
    let hi = tuples.iter().flatten().max().copied().unwrap_or(0) + k as i64;
    let table: Vec<HpComplex> = (lo..=hi)
        .into_par_iter()
        .map(|i| h_function_hp(p, i))
        .collect();
    let h = |i: i64| table[(i - lo) as usize].clone();
    let results: Vec<(f64, &Vec<i64>)> = tuples
        .par_iter()
        .map(|t| {
            let distinct = t.windows(2).all(|w| w[0] != w[1]);
            let d = if distinct {
                hankel_det(h, t, k).log10_norm()
            } else {
                f64::NEG_INFINITY
            };
            (d, t)
        })
        .collect();
    let (min_log, witness) = results
        .iter()
        .fold((f64::INFINITY, Vec::new()), |acc, (d, t)| {
            if *d < acc.0 {
                (*d, (*t).clone())
            } else {
                acc
            }
        });
    let min_abs = 10f64.powf(min_log);
    ScanReport {
        k,
        tuples: tuples.len(),
        min_log10_abs_det: min_log,
        min_abs_det: min_abs,
        witness,
        threshold,
        passed: tuples.is_empty() || min_log > threshold.log10(),
    }
}

/// Scans orders `1..=k_max` with consecutive and random row tuples.
pub fn h_scan(
    p: &FoliationParams,
    k_max: usize,
    range: i64,
    random: usize,
    seed: u64,
    threshold: f64,
) -> Vec<ScanReport> {
    (1..=k_max)
        .map(|k| h_scan_tuples(p, k, &row_tuples(k, range, random, seed), threshold))
        .collect()
}

/// Scale-aware test for an exactly or numerically vanishing determinant.
pub fn det_vanishes<F: SampleField>(f: impl Fn(i64) -> F, rows: &[i64], k: usize) -> bool {
    let entries: Vec<F> = rows
        .iter()
        .flat_map(|&i| (0..=k as i64).map(move |q| i + q))
        .map(&f)
        .collect();
    let m = scale_of(&entries);
    negligible(&hankel_det(f, rows, k), m.powi(k as i32 + 1))
}

/// A planted model, used for round trips.
#[derive(Debug, Clone, PartialEq)]
pub enum PlantedModel {
    PolyExp {
        beta: GaussRat,
        alphas: Vec<GaussRat>,
    },
    Exp {
        terms: Vec<(GaussRat, GaussRat)>,
    },
}

impl PlantedModel {
    pub fn eval(&self, i: i64) -> GaussRat {
        match self {
            PlantedModel::PolyExp { beta, alphas } => {
                let mut poly = GaussRat::zero();
                for (j, a) in alphas.iter().enumerate() {
                    poly = poly + a.clone() * int_pow::<GaussRat>(i, j);
                }
                field_pow(beta, i) * poly
            }
            PlantedModel::Exp { terms } => terms.iter().fold(GaussRat::zero(), |acc, (a, b)| {
                acc + a.clone() * field_pow(b, i)
            }),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            PlantedModel::PolyExp { alphas, .. } => alphas.len(),
            PlantedModel::Exp { terms } => terms.len(),
        }
    }

    /// Whether a classification recovers this model (`β_j` up to permutation).
    pub fn matches(&self, c: &Classification<GaussRat>) -> bool {
        match (self, c) {
            (
                PlantedModel::PolyExp { beta, alphas },
                Classification::PolyExp {
                    beta: b2,
                    alphas: a2,
                },
            ) => {
                beta == b2
                    && a2.len() >= alphas.len()
                    && alphas.iter().zip(a2).all(|(x, y)| x == y)
                    && a2[alphas.len()..].iter().all(Zero::is_zero)
            }
            (PlantedModel::Exp { terms }, Classification::Exp { terms: t2 }) => {
                terms.len() == t2.len() && terms.iter().all(|t| t2.contains(t))
            }
            _ => false,
        }
    }
}

/// Random planted model of exact order `k` with small Gaussian-rational parameters.
pub fn random_model(rng: &mut impl rand::Rng, k: usize) -> PlantedModel {
    let small = |rng: &mut dyn rand::RngCore, nonzero: bool| loop {
        let re = BigRational::new(
            BigInt::from(rng.next_u32() as i64 % 9 - 4),
            BigInt::from(rng.next_u32() as i64 % 3 + 1),
        );
        let im = BigRational::new(
            BigInt::from(rng.next_u32() as i64 % 5 - 2),
            BigInt::from(rng.next_u32() as i64 % 2 + 1),
        );
        let z = GaussRat::new(re, im);
        if !nonzero || !z.is_zero() {
            return z;
        }
    };
    if k == 1 || rng.gen_bool(0.5) {
        let beta = small(rng, true);
        let mut alphas: Vec<GaussRat> = (0..k).map(|_| small(rng, false)).collect();
        if alphas[k - 1].is_zero() {
            alphas[k - 1] = small(rng, true);
        }
        PlantedModel::PolyExp { beta, alphas }
    } else {
        let mut betas: Vec<GaussRat> = Vec::new();
        while betas.len() < k {
            let b = small(rng, true);
            if !betas.contains(&b) {
                betas.push(b);
            }
        }
        PlantedModel::Exp {
            terms: betas.into_iter().map(|b| (small(rng, true), b)).collect(),
        }
    }
}

/// `|x|` for rationals, re-exported for report formatting.
pub fn abs_rational(q: &BigRational) -> BigRational {
    q.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{gauss_int, int};

    #[test]
    fn binomial_identity_small() {
        assert!(alternating_binomial_sum(4, 3).is_zero());
        assert!(!alternating_binomial_sum(3, 3).is_zero());
    }

    #[test]
    fn geometric_two_by_two_vanishes() {
        let f = |i: i64| field_pow(&gauss_int(3, 1), i) * gauss_int(2, 0);
        assert!(hankel_det(f, &[-2, 5], 1).is_zero());
    }

    #[test]
    fn square_sequence_needs_order_three() {
        let f = |i: i64| gauss_int(i * i, 0);
        assert_eq!(hankel_det(f, &[0, 1], 1), gauss_int(-1, 0));
        let s = SequenceSamples::from_fn(-2, 8, 3, f).unwrap();
        match classify(&s) {
            Classification::PolyExp { beta, alphas } => {
                assert_eq!(beta, gauss_int(1, 0));
                assert_eq!(
                    alphas,
                    vec![gauss_int(0, 0), gauss_int(0, 0), gauss_int(1, 0)]
                );
            }
            other => panic!("{other:?}"),
        }
        let _ = int(0);
    }
}
