//! Normal-form arithmetic in the crossed product `O(T²) ⋊ R`.
//!
//! Every element is a finite sum `Σ c · v_t u₁ᵏ u₂ˡ` where the time `t` is a
//! rational combination of registered symbols `T_m`. Moving `u₁ᵏu₂ˡ` past
//! `v_s` produces the phase `e^{-i(ka+lb)s}`; in phase-symbolic mode that phase
//! is kept as a [`PhaseExponent`], otherwise it is evaluated.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{format_rational, gauss, parse_rational, rat_to_f64, GaussRat};
use crate::scalar::{AtomValues, CoeffValue, PhaseAtom, PhaseExponent, PhaseKey, Scalar};

/// How phases and coefficients are represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    ExactSymbolic,
    Numeric,
}

/// Slope data `(a, b)` of the foliation.
#[derive(Debug, Clone, PartialEq)]
pub struct FoliationParams {
    a: f64,
    b: f64,
    exact: Option<(BigRational, BigRational)>,
    mode: Mode,
    generic: bool,
}

impl FoliationParams {
    /// Floating point parameters; `a² + b² = 1` must hold to 1e-12.
    pub fn numeric(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) || !b.is_finite() {
            return Err(Error::InvalidParams(format!("need a > 0, got a = {a}")));
        }
        let defect = (a * a + b * b - 1.0).abs();
        if defect > 1e-12 {
            return Err(Error::InvalidParams(format!("a² + b² - 1 = {defect:e}")));
        }
        Ok(Self {
            a,
            b,
            exact: None,
            mode: Mode::Numeric,
            generic: true,
        })
    }

    /// Exact rational parameters with `a² + b² = 1`.
    pub fn rational(a: BigRational, b: BigRational) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::InvalidParams(format!("need a > 0, got a = {a}")));
        }
        if &a * &a + &b * &b != BigRational::one() {
            return Err(Error::InvalidParams(format!(
                "a² + b² ≠ 1 for a = {a}, b = {b}"
            )));
        }
        // b/a is rational here; algebra independence has to be asked for explicitly
        Ok(Self {
            a: rat_to_f64(&a),
            b: rat_to_f64(&b),
            exact: Some((a, b)),
            mode: Mode::ExactSymbolic,
            generic: false,
        })
    }

    /// `a = p/√(p²+q²)`, `b = q/√(p²+q²)`; exact when the hypotenuse is an integer.
    pub fn pythagorean(p: i64, q: i64) -> Result<Self> {
        let r2 = p * p + q * q;
        let r = (r2 as f64).sqrt().round() as i64;
        if r * r == r2 && r > 0 {
            let r = BigInt::from(r);
            Self::rational(
                BigRational::new(BigInt::from(p), r.clone()),
                BigRational::new(BigInt::from(q), r),
            )
        } else {
            let h = (r2 as f64).sqrt();
            Self::numeric(p as f64 / h, q as f64 / h)
        }
    }

    pub fn with_generic(mut self, generic: bool) -> Self {
        self.generic = generic;
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Result<Self> {
        if mode == Mode::ExactSymbolic && self.exact.is_none() {
            return Err(Error::NotExact);
        }
        self.mode = mode;
        Ok(self)
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn exact(&self) -> Option<&(BigRational, BigRational)> {
        self.exact.as_ref()
    }
    pub fn mode(&self) -> Mode {
        self.mode
    }
    pub fn is_generic(&self) -> bool {
        self.generic
    }
}

static NEXT_REGISTRY: AtomicU64 = AtomicU64::new(1);

/// The finite set of time symbols `T_1, …, T_n` an element may use.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeRegistry {
    id: u64,
    names: Vec<String>,
    values: Vec<f64>,
}

impl TimeRegistry {
    /// Registers symbols with their numeric values; names must be distinct.
    pub fn new(symbols: &[(&str, f64)]) -> Result<Arc<Self>> {
        let mut names: Vec<String> = Vec::new();
        for (n, _) in symbols {
            if names.iter().any(|m| m == n) {
                return Err(Error::InvalidParams(format!(
                    "time symbol `{n}` registered twice"
                )));
            }
            names.push(n.to_string());
        }
        Ok(Arc::new(Self {
            id: NEXT_REGISTRY.fetch_add(1, Ordering::Relaxed),
            names,
            values: symbols.iter().map(|(_, v)| *v).collect(),
        }))
    }

    pub fn id(&self) -> u64 {
        self.id
    }
    pub fn len(&self) -> usize {
        self.names.len()
    }
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
    pub fn names(&self) -> &[String] {
        &self.names
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }
}

/// A time `Σ q_m T_m` with rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Time(Vec<BigRational>);

impl Time {
    pub fn zero(n: usize) -> Self {
        Self(vec![BigRational::zero(); n])
    }

    pub fn symbol(n: usize, m: usize, q: BigRational) -> Self {
        let mut t = Self::zero(n);
        t.0[m] = q;
        t
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(x, y)| x + y).collect())
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|x| -x.clone()).collect())
    }

    pub fn value(&self, reg: &TimeRegistry) -> f64 {
        self.0
            .iter()
            .zip(&reg.values)
            .map(|(q, v)| rat_to_f64(q) * v)
            .sum()
    }
}

/// Basis monomial `v_t u₁ᵏ u₂ˡ`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub t: Time,
    pub k: i64,
    pub l: i64,
}

/// Finite sum of monomials with nonzero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement<S: Scalar> {
    registry: u64,
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> AlgebraElement<S> {
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn registry_id(&self) -> u64 {
        self.registry
    }

    fn push(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = v.clone() + c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }
}

/// One record of the text serialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub t: Vec<String>,
    pub k: i64,
    pub l: i64,
    pub re: serde_json::Value,
    pub im: serde_json::Value,
    /// Coefficients of `a·T_1, b·T_1, a·T_2, …, 2πθ`.
    pub phase: Vec<String>,
    #[serde(default, skip_serializing_if = "is_zero_i32")]
    pub root2pi: i32,
}

fn is_zero_i32(x: &i32) -> bool {
    *x == 0
}

/// Arithmetic context: parameters, time symbols and phase evaluation data.
#[derive(Debug, Clone)]
pub struct Kronecker<S: Scalar> {
    params: FoliationParams,
    registry: Arc<TimeRegistry>,
    env: AtomValues,
    a: S,
    b: S,
}

impl<S: Scalar> Kronecker<S> {
    pub fn new(params: FoliationParams, registry: Arc<TimeRegistry>) -> Result<Self> {
        let (a, b) = if S::EXACT_COEFFS {
            let (a, b) = params.exact().ok_or(Error::NotExact)?;
            let z = BigRational::zero();
            (
                S::from_gauss(&gauss(a.clone(), z.clone())),
                S::from_gauss(&gauss(b.clone(), z)),
            )
        } else {
            (real::<S>(params.a()), real::<S>(params.b()))
        };
        let env = AtomValues {
            a: params.a(),
            b: params.b(),
            times: registry.values().to_vec(),
            theta: 0.0,
        };
        Ok(Self {
            params,
            registry,
            env,
            a,
            b,
        })
    }

    pub fn params(&self) -> &FoliationParams {
        &self.params
    }
    pub fn registry(&self) -> &Arc<TimeRegistry> {
        &self.registry
    }
    pub fn env(&self) -> &AtomValues {
        &self.env
    }
    /// `a` as a scalar.
    pub fn a(&self) -> &S {
        &self.a
    }
    pub fn b(&self) -> &S {
        &self.b
    }

    /// `ak + bl`, the leaf-direction symbol of mode `(k, l)`.
    pub fn x_symbol(&self, k: i64, l: i64) -> S {
        self.a.clone() * S::from_int(k) + self.b.clone() * S::from_int(l)
    }

    /// `al - bk`, the transverse symbol of mode `(k, l)`.
    pub fn y_symbol(&self, k: i64, l: i64) -> S {
        self.a.clone() * S::from_int(l) - self.b.clone() * S::from_int(k)
    }

    fn nsym(&self) -> usize {
        self.registry.len()
    }

    pub fn zero(&self) -> AlgebraElement<S> {
        AlgebraElement {
            registry: self.registry.id(),
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(&self, c: S, t: Time, k: i64, l: i64) -> AlgebraElement<S> {
        let mut x = self.zero();
        x.push(Monomial { t, k, l }, c);
        x
    }

    pub fn one(&self) -> AlgebraElement<S> {
        self.monomial(S::one(), Time::zero(self.nsym()), 0, 0)
    }

    pub fn scalar(&self, c: S) -> AlgebraElement<S> {
        self.monomial(c, Time::zero(self.nsym()), 0, 0)
    }

    /// `u₁ᵏ u₂ˡ`.
    pub fn u(&self, k: i64, l: i64) -> AlgebraElement<S> {
        self.monomial(S::one(), Time::zero(self.nsym()), k, l)
    }

    pub fn u1(&self) -> AlgebraElement<S> {
        self.u(1, 0)
    }

    pub fn u2(&self) -> AlgebraElement<S> {
        self.u(0, 1)
    }

    pub fn v(&self, t: Time) -> AlgebraElement<S> {
        self.monomial(S::one(), t, 0, 0)
    }

    /// `v_{q·T}` for the registered symbol `name`.
    pub fn v_symbol(&self, name: &str, q: BigRational) -> Result<AlgebraElement<S>> {
        let m = self.registry.index(name)?;
        Ok(self.v(Time::symbol(self.nsym(), m, q)))
    }

    /// Exponent `(ka + lb)·t` as a formal phase.
    pub fn shift_exponent(&self, t: &Time, k: i64, l: i64) -> PhaseExponent {
        let mut e = PhaseExponent::zero();
        for (m, q) in t.coords().iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            e.add_term(PhaseAtom::A(m as u32), q * BigInt::from(k));
            e.add_term(PhaseAtom::B(m as u32), q * BigInt::from(l));
        }
        e
    }

    /// `e^{i(ak+bl)t}`, the eigenvalue of `v_t` on mode `(k, l)`.
    pub fn mode_phase(&self, t: &Time, k: i64, l: i64) -> S {
        S::phase(&self.shift_exponent(t, k, l), &self.env)
    }

    fn check(&self, x: &AlgebraElement<S>) -> Result<()> {
        if x.registry != self.registry.id() {
            return Err(Error::RegistryMismatch(x.registry, self.registry.id()));
        }
        Ok(())
    }

    pub fn add(&self, x: &AlgebraElement<S>, y: &AlgebraElement<S>) -> Result<AlgebraElement<S>> {
        self.check(x)?;
        self.check(y)?;
        let mut out = x.clone();
        for (m, c) in &y.terms {
            out.push(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, x: &AlgebraElement<S>, y: &AlgebraElement<S>) -> Result<AlgebraElement<S>> {
        self.add(x, &self.scale(&-S::one(), y))
    }

    pub fn scale(&self, c: &S, x: &AlgebraElement<S>) -> AlgebraElement<S> {
        let mut out = self.zero();
        out.registry = x.registry;
        for (m, v) in &x.terms {
            out.push(m.clone(), c.clone() * v.clone());
        }
        out
    }

    /// Normal form of the product.
    pub fn multiply(
        &self,
        x: &AlgebraElement<S>,
        y: &AlgebraElement<S>,
    ) -> Result<AlgebraElement<S>> {
        self.check(x)?;
        self.check(y)?;
        let mut out = self.zero();
        for (m1, c1) in &x.terms {
            for (m2, c2) in &y.terms {
                // v_t u^{k1,l1} v_s u^{k2,l2} = e^{-i(k1 a + l1 b)s} v_{t+s} u^{k1+k2, l1+l2}
                let ph = self.mode_phase(&m2.t.negated(), m1.k, m1.l);
                let c = c1.clone() * c2.clone() * ph;
                out.push(
                    Monomial {
                        t: m1.t.plus(&m2.t),
                        k: m1.k + m2.k,
                        l: m1.l + m2.l,
                    },
                    c,
                );
            }
        }
        Ok(out)
    }

    pub fn product(&self, factors: &[&AlgebraElement<S>]) -> Result<AlgebraElement<S>> {
        let mut acc = self.one();
        for f in factors {
            acc = self.multiply(&acc, f)?;
        }
        Ok(acc)
    }

    /// The involution; `(c v_t u₁ᵏu₂ˡ)* = c̄ e^{-i(ka+lb)t} v_{-t} u₁⁻ᵏ u₂⁻ˡ`.
    pub fn star(&self, x: &AlgebraElement<S>) -> AlgebraElement<S> {
        let mut out = self.zero();
        out.registry = x.registry;
        for (m, c) in &x.terms {
            let ph = self.mode_phase(&m.t.negated(), m.k, m.l);
            out.push(
                Monomial {
                    t: m.t.negated(),
                    k: -m.k,
                    l: -m.l,
                },
                c.conj() * ph,
            );
        }
        out
    }

    /// Termwise equality. With formal phases this is only meaningful for
    /// generic parameters and is refused otherwise.
    pub fn equals(&self, x: &AlgebraElement<S>, y: &AlgebraElement<S>) -> Result<bool> {
        if S::SYMBOLIC_PHASES && !self.params.is_generic() {
            return Err(Error::NonGeneric);
        }
        let d = self.sub(x, y)?;
        if S::SYMBOLIC_PHASES && S::EXACT_COEFFS {
            return Ok(d.is_empty());
        }
        Ok(self.residual(&d) <= 1e-10)
    }

    /// Largest coefficient modulus after evaluating phases.
    pub fn residual(&self, x: &AlgebraElement<S>) -> f64 {
        x.terms
            .values()
            .map(|c| c.approx(&self.env).norm())
            .fold(0.0, f64::max)
    }

    /// Rebuilds the normal form term by term.
    pub fn normalize(&self, x: &AlgebraElement<S>) -> AlgebraElement<S> {
        let mut out = self.zero();
        out.registry = x.registry;
        for (m, c) in &x.terms {
            out.push(m.clone(), c.clone());
        }
        out
    }

    fn phase_atoms(&self) -> Vec<PhaseAtom> {
        let mut atoms = Vec::new();
        for m in 0..self.nsym() as u32 {
            atoms.push(PhaseAtom::A(m));
            atoms.push(PhaseAtom::B(m));
        }
        atoms.push(PhaseAtom::Theta);
        atoms
    }

    pub fn to_records(&self, x: &AlgebraElement<S>) -> Vec<TermRecord> {
        let atoms = self.phase_atoms();
        let mut out = Vec::new();
        for (m, c) in &x.terms {
            for (key, v) in c.to_parts() {
                let (re, im) = match v {
                    CoeffValue::Exact(g) => (
                        serde_json::Value::String(format_rational(&g.re)),
                        serde_json::Value::String(format_rational(&g.im)),
                    ),
                    CoeffValue::Float(z) => (z.re.into(), z.im.into()),
                };
                out.push(TermRecord {
                    t: m.t.coords().iter().map(format_rational).collect(),
                    k: m.k,
                    l: m.l,
                    re,
                    im,
                    phase: atoms
                        .iter()
                        .map(|a| format_rational(&key.phase.coeff(*a)))
                        .collect(),
                    root2pi: key.root2pi,
                });
            }
        }
        out
    }

    pub fn to_json(&self, x: &AlgebraElement<S>) -> String {
        serde_json::to_string(&self.to_records(x)).expect("records serialize")
    }

    pub fn from_records(&self, records: &[TermRecord]) -> Result<AlgebraElement<S>> {
        let atoms = self.phase_atoms();
        let mut out = self.zero();
        for r in records {
            if r.t.len() != self.nsym() || r.phase.len() != atoms.len() {
                return Err(Error::Parse(
                    "record shape does not match the registry".into(),
                ));
            }
            let t = Time(
                r.t.iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<_>>()?,
            );
            let mut phase = PhaseExponent::zero();
            for (a, s) in atoms.iter().zip(&r.phase) {
                phase.add_term(*a, parse_rational(s)?);
            }
            let coeff = match (&r.re, &r.im) {
                (serde_json::Value::String(re), serde_json::Value::String(im)) => {
                    CoeffValue::Exact(gauss(parse_rational(re)?, parse_rational(im)?))
                }
                (re, im) => CoeffValue::Float(Complex64::new(
                    re.as_f64()
                        .ok_or_else(|| Error::Parse(format!("bad re {re}")))?,
                    im.as_f64()
                        .ok_or_else(|| Error::Parse(format!("bad im {im}")))?,
                )),
            };
            let key = PhaseKey {
                phase,
                root2pi: r.root2pi,
            };
            let c = S::from_part(&key, &coeff, &self.env)
                .ok_or_else(|| Error::Parse("coefficient kind does not fit the mode".into()))?;
            out.push(Monomial { t, k: r.k, l: r.l }, c);
        }
        Ok(out)
    }

    pub fn from_json(&self, s: &str) -> Result<AlgebraElement<S>> {
        let records: Vec<TermRecord> =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        self.from_records(&records)
    }
}

/// Embeds a real number; rational scalars get a nearby rational.
pub fn real<S: Scalar>(x: f64) -> S {
    match BigRational::from_float(x) {
        Some(q) => S::from_gauss(&GaussRat::new(q, BigRational::zero())),
        None => S::zero(),
    }
}

/// Convenience for tests and the CLI: `k` as an `i64` if it fits.
pub fn small(q: &BigRational) -> Option<i64> {
    if q.is_integer() {
        q.to_integer().to_i64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{gauss_int, int, rat};
    use crate::scalar::Exact;

    fn ctx() -> Kronecker<Exact> {
        let p = FoliationParams::pythagorean(3, 4)
            .unwrap()
            .with_generic(true);
        let reg = TimeRegistry::new(&[("T1", 0.7), ("T2", -1.3)]).unwrap();
        Kronecker::new(p, reg).unwrap()
    }

    #[test]
    fn pythagorean_is_exact() {
        let p = FoliationParams::pythagorean(3, 4).unwrap();
        assert_eq!(p.exact().unwrap(), &(rat(3, 5), rat(4, 5)));
        assert!(!p.is_generic());
        let q = FoliationParams::pythagorean(1, 1).unwrap();
        assert!(q.exact().is_none());
        assert!(FoliationParams::numeric(0.6, 0.9).is_err());
        assert!(FoliationParams::numeric(-0.6, 0.8).is_err());
    }

    #[test]
    fn u1_times_vt_carries_minus_a_t() {
        let k = ctx();
        let v = k.v_symbol("T1", int(1)).unwrap();
        let x = k.multiply(&k.u1(), &v).unwrap();
        let (m, c) = x.terms().next().unwrap();
        assert_eq!((m.k, m.l), (1, 0));
        assert_eq!(m.t, Time::symbol(2, 0, int(1)));
        let (key, coeff) = c.single().unwrap();
        assert_eq!(key.phase, PhaseExponent::atom(PhaseAtom::A(0), int(-1)));
        assert_eq!(coeff, &gauss_int(1, 0));
    }

    #[test]
    fn star_of_i_vt() {
        let k = ctx();
        let v = k.v_symbol("T1", int(1)).unwrap();
        let x = k.scale(&Exact::i(), &v);
        let want = k.scale(&-Exact::i(), &k.v_symbol("T1", int(-1)).unwrap());
        assert!(k.equals(&k.star(&x), &want).unwrap());
    }

    #[test]
    fn non_generic_equality_is_refused() {
        let p = FoliationParams::pythagorean(3, 4).unwrap();
        let k: Kronecker<Exact> = Kronecker::new(p, TimeRegistry::new(&[]).unwrap()).unwrap();
        assert_eq!(k.equals(&k.u1(), &k.u1()), Err(Error::NonGeneric));
    }

    #[test]
    fn registries_do_not_mix() {
        let k1 = ctx();
        let k2 = ctx();
        assert!(matches!(
            k1.multiply(&k1.u1(), &k2.u1()),
            Err(Error::RegistryMismatch(_, _))
        ));
    }

    #[test]
    fn json_roundtrip() {
        let k = ctx();
        let v = k.v_symbol("T2", rat(1, 2)).unwrap();
        let x = k
            .add(
                &k.multiply(&k.u(2, -1), &v).unwrap(),
                &k.scale(&Exact::i(), &k.u2()),
            )
            .unwrap();
        let s = k.to_json(&x);
        assert_eq!(k.from_json(&s).unwrap(), x);
    }
}
