//! Scalars that may carry formal phases.
//!
//! In phase-symbolic mode a number is a finite sum `Σ c · e^{iφ} · σ^n` where
//! `φ` is a rational combination of formal angles (`a·T`, `b·T`, `2πθ`), and
//! `σ = √(2π)`. Distinct keys are treated as linearly independent, which is
//! what makes relation checks decidable exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{rat_to_f64, Coeff, GaussRat};

/// Serializable coefficient: exact Gaussian rational or double precision.
#[derive(Debug, Clone, PartialEq)]
pub enum CoeffValue {
    Exact(GaussRat),
    Float(Complex64),
}

/// A formal angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PhaseAtom {
    /// `a·T_m` for registered time symbol `m`.
    A(u32),
    /// `b·T_m`.
    B(u32),
    /// `2πθ` of the rotation algebra.
    Theta,
}

/// Numeric values of the formal angles, used to evaluate phases.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AtomValues {
    pub a: f64,
    pub b: f64,
    pub times: Vec<f64>,
    pub theta: f64,
}

impl AtomValues {
    pub fn value(&self, atom: PhaseAtom) -> f64 {
        match atom {
            PhaseAtom::A(m) => self.a * self.times.get(m as usize).copied().unwrap_or(0.0),
            PhaseAtom::B(m) => self.b * self.times.get(m as usize).copied().unwrap_or(0.0),
            PhaseAtom::Theta => 2.0 * std::f64::consts::PI * self.theta,
        }
    }
}

/// `φ = Σ q_atom · atom`; the zero map is phase 1.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhaseExponent(BTreeMap<PhaseAtom, BigRational>);

impl PhaseExponent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn atom(atom: PhaseAtom, q: BigRational) -> Self {
        let mut e = Self::zero();
        e.add_term(atom, q);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_term(&mut self, atom: PhaseAtom, q: BigRational) {
        if q.is_zero() {
            return;
        }
        let entry = self.0.entry(atom).or_insert_with(BigRational::zero);
        *entry += q;
        if entry.is_zero() {
            self.0.remove(&atom);
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (atom, q) in &other.0 {
            out.add_term(*atom, q.clone());
        }
        out
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|(a, q)| (*a, -q.clone())).collect())
    }

    pub fn coeff(&self, atom: PhaseAtom) -> BigRational {
        self.0.get(&atom).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PhaseAtom, &BigRational)> {
        self.0.iter()
    }

    pub fn angle(&self, env: &AtomValues) -> f64 {
        self.0
            .iter()
            .map(|(a, q)| rat_to_f64(q) * env.value(*a))
            .sum()
    }
}

impl fmt::Display for PhaseExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(a, q)| {
                let atom = match a {
                    PhaseAtom::A(m) => format!("aT{}", m + 1),
                    PhaseAtom::B(m) => format!("bT{}", m + 1),
                    PhaseAtom::Theta => "2πθ".to_string(),
                };
                format!("{}·{}", crate::exact::format_rational(q), atom)
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Key of a phase-symbolic term: `e^{iφ} · √(2π)^root`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhaseKey {
    pub phase: PhaseExponent,
    pub root2pi: i32,
}

impl PhaseKey {
    fn times(&self, other: &Self) -> Self {
        PhaseKey {
            phase: self.phase.plus(&other.phase),
            root2pi: self.root2pi + other.root2pi,
        }
    }

    pub fn value(&self, env: &AtomValues) -> Complex64 {
        let mag = (2.0 * std::f64::consts::PI).sqrt().powi(self.root2pi);
        Complex64::from_polar(mag, self.phase.angle(env))
    }
}

/// Finite sum of coefficient × formal phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSum<C: Coeff> {
    terms: BTreeMap<PhaseKey, C>,
}

impl<C: Coeff> PhaseSum<C> {
    pub fn constant(c: C) -> Self {
        Self::term(PhaseKey::default(), c)
    }

    pub fn term(key: PhaseKey, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(key, c);
        }
        Self { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PhaseKey, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn accumulate(&mut self, key: PhaseKey, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(v) => {
                let scale = v.to_c64().norm() + c.to_c64().norm();
                *v = v.clone() + c;
                // float coefficients under one formal phase cancel up to rounding of equal products
                let rounding = !C::EXACT && v.to_c64().norm() <= 8.0 * f64::EPSILON * scale;
                if v.is_zero() || rounding {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    /// The single coefficient when the sum has exactly one phase.
    pub fn single(&self) -> Option<(&PhaseKey, &C)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }
}

impl<C: Coeff> Zero for PhaseSum<C> {
    fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<C: Coeff> One for PhaseSum<C> {
    fn one() -> Self {
        Self::constant(C::one())
    }
}

impl<C: Coeff> Add for PhaseSum<C> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (k, c) in rhs.terms {
            self.accumulate(k, c);
        }
        self
    }
}

impl<C: Coeff> Sub for PhaseSum<C> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<C: Coeff> Neg for PhaseSum<C> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            terms: self.terms.into_iter().map(|(k, c)| (k, -c)).collect(),
        }
    }
}

impl<C: Coeff> Mul for PhaseSum<C> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zero();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &rhs.terms {
                out.accumulate(k1.times(k2), c1.clone() * c2.clone());
            }
        }
        out
    }
}

/// Scalar type of operators and algebra coefficients.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Coefficients are exact rationals.
    const EXACT_COEFFS: bool;
    /// Phases are kept formal.
    const SYMBOLIC_PHASES: bool;

    fn from_gauss(z: &GaussRat) -> Self;
    fn phase(exp: &PhaseExponent, env: &AtomValues) -> Self;
    /// `√(2π)^power`.
    fn root_two_pi(power: i32) -> Self;
    fn conj(&self) -> Self;
    fn approx(&self, env: &AtomValues) -> Complex64;
    /// Upper bound for `|x|²` that needs no phase values.
    fn mass_hint(&self) -> f64;
    /// Splits into `(phase, coefficient)` parts.
    fn to_parts(&self) -> Vec<(PhaseKey, CoeffValue)>;
    /// Rebuilds one part; `None` when the coefficient kind does not fit.
    fn from_part(key: &PhaseKey, c: &CoeffValue, env: &AtomValues) -> Option<Self>;

    fn i() -> Self {
        Self::from_gauss(&GaussRat::new(BigRational::zero(), BigRational::one()))
    }

    fn from_int(n: i64) -> Self {
        Self::from_gauss(&crate::exact::gauss_int(n, 0))
    }
}

/// Scalars that can also hold arbitrary floating point values.
pub trait NumericScalar: Scalar {
    fn from_c64(z: Complex64) -> Self;
}

impl Scalar for Complex64 {
    const EXACT_COEFFS: bool = false;
    const SYMBOLIC_PHASES: bool = false;

    fn from_gauss(z: &GaussRat) -> Self {
        crate::exact::gauss_to_c64(z)
    }
    fn phase(exp: &PhaseExponent, env: &AtomValues) -> Self {
        Complex64::from_polar(1.0, exp.angle(env))
    }
    fn root_two_pi(power: i32) -> Self {
        Complex64::new((2.0 * std::f64::consts::PI).sqrt().powi(power), 0.0)
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn approx(&self, _env: &AtomValues) -> Complex64 {
        *self
    }
    fn mass_hint(&self) -> f64 {
        self.norm_sqr()
    }
    fn to_parts(&self) -> Vec<(PhaseKey, CoeffValue)> {
        if self.is_zero() {
            Vec::new()
        } else {
            vec![(PhaseKey::default(), CoeffValue::Float(*self))]
        }
    }
    fn from_part(key: &PhaseKey, c: &CoeffValue, env: &AtomValues) -> Option<Self> {
        let z = match c {
            CoeffValue::Exact(g) => crate::exact::gauss_to_c64(g),
            CoeffValue::Float(z) => *z,
        };
        Some(z * key.value(env))
    }
}

impl NumericScalar for Complex64 {
    fn from_c64(z: Complex64) -> Self {
        z
    }
}

impl<C: Coeff> Scalar for PhaseSum<C> {
    const EXACT_COEFFS: bool = C::EXACT;
    const SYMBOLIC_PHASES: bool = true;

    fn from_gauss(z: &GaussRat) -> Self {
        Self::constant(C::from_gauss(z))
    }
    fn phase(exp: &PhaseExponent, _env: &AtomValues) -> Self {
        Self::term(
            PhaseKey {
                phase: exp.clone(),
                root2pi: 0,
            },
            C::one(),
        )
    }
    fn root_two_pi(power: i32) -> Self {
        Self::term(
            PhaseKey {
                phase: PhaseExponent::zero(),
                root2pi: power,
            },
            C::one(),
        )
    }
    fn conj(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| {
                    (
                        PhaseKey {
                            phase: k.phase.negated(),
                            root2pi: k.root2pi,
                        },
                        c.conj(),
                    )
                })
                .collect(),
        }
    }
    fn approx(&self, env: &AtomValues) -> Complex64 {
        self.terms
            .iter()
            .map(|(k, c)| k.value(env) * c.to_c64())
            .sum()
    }
    fn mass_hint(&self) -> f64 {
        let (mut s, mut any) = (0.0, false);
        for (k, c) in &self.terms {
            let mag = (2.0 * std::f64::consts::PI).sqrt().powi(k.root2pi);
            s += c.to_c64().norm() * mag;
            any = true;
        }
        if any {
            s * s
        } else {
            0.0
        }
    }
    fn to_parts(&self) -> Vec<(PhaseKey, CoeffValue)> {
        self.terms
            .iter()
            .map(|(k, c)| (k.clone(), c.to_value()))
            .collect()
    }
    fn from_part(key: &PhaseKey, c: &CoeffValue, _env: &AtomValues) -> Option<Self> {
        Some(Self::term(key.clone(), C::from_value(c)?))
    }
}

impl NumericScalar for PhaseSum<Complex64> {
    fn from_c64(z: Complex64) -> Self {
        Self::constant(z)
    }
}

/// Exact phase-symbolic scalars.
pub type Exact = PhaseSum<GaussRat>;
/// Phase-symbolic scalars with floating point coefficients.
pub type Symbolic = PhaseSum<Complex64>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{gauss_int, rat};

    #[test]
    fn phases_multiply_by_adding_exponents() {
        let env = AtomValues::default();
        let p = Exact::phase(&PhaseExponent::atom(PhaseAtom::A(0), rat(1, 1)), &env);
        let q = Exact::phase(&PhaseExponent::atom(PhaseAtom::A(0), rat(-1, 1)), &env);
        assert_eq!(p.clone() * q, Exact::one());
        assert_ne!(p, Exact::one());
    }

    #[test]
    fn conj_negates_phase_and_conjugates() {
        let env = AtomValues {
            a: 0.6,
            b: 0.8,
            times: vec![1.3],
            theta: 0.0,
        };
        let x = Exact::phase(&PhaseExponent::atom(PhaseAtom::B(0), rat(2, 3)), &env)
            * Exact::from_gauss(&gauss_int(1, 2));
        let lhs = x.conj().approx(&env);
        let rhs = x.approx(&env).conj();
        assert!((lhs - rhs).norm() < 1e-14);
        assert_eq!(x.conj().conj(), x);
    }

    #[test]
    fn cancellation_removes_terms() {
        let x = Exact::from_gauss(&gauss_int(3, -1));
        assert!((x.clone() - x).is_zero());
    }

    #[test]
    fn root_two_pi_squares_to_two_pi() {
        let env = AtomValues::default();
        let s = Symbolic::root_two_pi(1);
        let v = (s.clone() * s).approx(&env);
        assert!((v.re - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }
}
