//! The irrational rotation algebra `uv = e^{-2πiθ} vu` with its two-component
//! spectral triple on `H_τ ⊕ H_τ`.
//!
//! Basis `e^±_{kl}` (component 1 is `+`); `U e^±_{kl} = e^±_{k+1,l}`,
//! `V e^±_{kl} = e^{2πikθ} e^±_{k,l+1}` and `D e^±_{kl} = √(2π)(±ik + l) e^∓_{kl}`.
//! The differential relations are checked in their operator-consistent form:
//! `u dv = e^{-2πiθ} dv u` and `du dv = -e^{-2πiθ} dv du`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::FoliationParams;
use crate::exact::{gauss, int, rat};
use crate::hilbert::{
    check_equal, check_zero, mat_entries, mat_identity, BlockOperator, ModeIndex, Multiplier,
    SectionVector, Window,
};
use crate::report::{RelationReport, Status};
use crate::scalar::{AtomValues, PhaseAtom, PhaseExponent, Scalar};
use crate::spectral::{weyl_count, Branch, CountedOperator, WeylCount};

/// `θ` and the evaluation environment.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusParams {
    pub theta: f64,
}

impl TorusParams {
    pub fn new(theta: f64) -> crate::Result<Self> {
        if !theta.is_finite() {
            return Err(crate::Error::InvalidParams("θ must be finite".into()));
        }
        Ok(Self { theta })
    }

    pub fn env(&self) -> AtomValues {
        AtomValues {
            theta: self.theta,
            ..Default::default()
        }
    }
}

/// `u^k v^l ↦ coefficient`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusElement<S: Scalar> {
    terms: BTreeMap<(i64, i64), S>,
}

impl<S: Scalar> TorusElement<S> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(c: S, k: i64, l: i64) -> Self {
        let mut x = Self::zero();
        x.push((k, l), c);
        x
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &S)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn push(&mut self, key: (i64, i64), c: S) {
        if c.is_zero() {
            return;
        }
        let v = self.terms.entry(key).or_insert_with(S::zero);
        *v = v.clone() + c;
        if v.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.push(*k, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.push(*k, c.clone() * v.clone());
        }
        out
    }

    /// The tracial state: the coefficient of `1`.
    pub fn trace(&self) -> S {
        self.terms.get(&(0, 0)).cloned().unwrap_or_else(S::zero)
    }
}

/// Operators and algebra of the rotation-algebra triple over a scalar type.
#[derive(Debug, Clone)]
pub struct TorusGeometry<S: Scalar> {
    params: TorusParams,
    env: AtomValues,
    tamper: bool,
    _s: std::marker::PhantomData<S>,
}

fn theta_phase<S: Scalar>(q: i64, env: &AtomValues) -> S {
    S::phase(&PhaseExponent::atom(PhaseAtom::Theta, int(q)), env)
}

impl<S: Scalar> TorusGeometry<S> {
    pub const DIM: usize = 2;

    pub fn new(params: TorusParams) -> Self {
        let env = params.env();
        Self {
            params,
            env,
            tamper: false,
            _s: Default::default(),
        }
    }

    /// Negative-control hook: flips the sign of the `+ → -` block of `D`.
    pub fn tampered(mut self) -> Self {
        self.tamper = true;
        self
    }

    pub fn params(&self) -> &TorusParams {
        &self.params
    }
    pub fn env(&self) -> &AtomValues {
        &self.env
    }

    /// `e^{2πiqθ}`.
    pub fn phase(&self, q: i64) -> S {
        theta_phase(q, &self.env)
    }

    /// `u^k v^l · u^m v^n = e^{2πi l m θ} u^{k+m} v^{l+n}`.
    pub fn multiply(&self, x: &TorusElement<S>, y: &TorusElement<S>) -> TorusElement<S> {
        let mut out = TorusElement::zero();
        for (&(k, l), c1) in &x.terms {
            for (&(m, n), c2) in &y.terms {
                out.push((k + m, l + n), c1.clone() * c2.clone() * self.phase(l * m));
            }
        }
        out
    }

    /// `(c u^k v^l)* = c̄ v^{-l} u^{-k} = c̄ e^{2πi k l θ} u^{-k} v^{-l}`.
    pub fn star(&self, x: &TorusElement<S>) -> TorusElement<S> {
        let mut out = TorusElement::zero();
        for (&(k, l), c) in &x.terms {
            out.push((-k, -l), c.conj() * self.phase(k * l));
        }
        out
    }

    pub fn u(&self, k: i64) -> TorusElement<S> {
        TorusElement::monomial(S::one(), k, 0)
    }

    pub fn v(&self, l: i64) -> TorusElement<S> {
        TorusElement::monomial(S::one(), 0, l)
    }

    /// `π(u^k v^l) e^±_{mn} = e^{2πi m l θ} e^±_{m+k, n+l}`, on both components.
    pub fn represent(&self, x: &TorusElement<S>) -> BlockOperator<S> {
        let mut op = BlockOperator::zero(Self::DIM);
        for (&(k, l), c) in &x.terms {
            let (c, env) = (c.clone(), self.env.clone());
            let mult: Multiplier<S> =
                Arc::new(move |m, _| c.clone() * theta_phase::<S>(m * l, &env));
            op = op.add(&BlockOperator::block(
                mat_identity(Self::DIM),
                (k, l),
                Some(mult),
            ));
        }
        op
    }

    /// `U = π(u)`.
    pub fn op_u(&self) -> BlockOperator<S> {
        self.represent(&self.u(1))
    }

    /// `V = π(v)`.
    pub fn op_v(&self) -> BlockOperator<S> {
        self.represent(&self.v(1))
    }

    /// `D e^+ = √(2π)(ik+l) e^-`, `D e^- = √(2π)(-ik+l) e^+`.
    pub fn dirac(&self) -> BlockOperator<S> {
        let s = if self.tamper { -1 } else { 1 };
        let down: Multiplier<S> = Arc::new(move |k, l| {
            S::root_two_pi(1) * (S::i() * S::from_int(k) + S::from_int(l)) * S::from_int(s)
        });
        let up: Multiplier<S> =
            Arc::new(|k, l| S::root_two_pi(1) * (-(S::i() * S::from_int(k)) + S::from_int(l)));
        BlockOperator::block(mat_entries(Self::DIM, &[(1, 0, 1)]), (0, 0), Some(down)).add(
            &BlockOperator::block(mat_entries(Self::DIM, &[(0, 1, 1)]), (0, 0), Some(up)),
        )
    }

    /// `[D, π(x)]`.
    pub fn d(&self, x: &TorusElement<S>) -> BlockOperator<S> {
        self.dirac().commutator(&self.represent(x))
    }

    /// `δ₁(u^k v^l) = 2πik u^k v^l` as a diagonal operator.
    pub fn delta1(&self) -> BlockOperator<S> {
        let m: Multiplier<S> = Arc::new(|k, _| S::root_two_pi(2) * S::i() * S::from_int(k));
        BlockOperator::block(mat_identity(Self::DIM), (0, 0), Some(m))
    }

    /// `δ₂(u^k v^l) = 2πil u^k v^l`.
    pub fn delta2(&self) -> BlockOperator<S> {
        let m: Multiplier<S> = Arc::new(|_, l| S::root_two_pi(2) * S::i() * S::from_int(l));
        BlockOperator::block(mat_identity(Self::DIM), (0, 0), Some(m))
    }

    /// `δ_j` on algebra elements.
    pub fn derivation(&self, j: u8, x: &TorusElement<S>) -> TorusElement<S> {
        let mut out = TorusElement::zero();
        for (&(k, l), c) in &x.terms {
            let n = if j == 1 { k } else { l };
            out.push(
                (k, l),
                c.clone() * S::root_two_pi(2) * S::i() * S::from_int(n),
            );
        }
        out
    }
}

/// `±√(2π)√(k²+l²)` with unit eigenvectors `(e^+ ± w e^-)/√2`, `w = (ik+l)/|ik+l|`;
/// on `k = l = 0` the two frame vectors with eigenvalue 0.
pub fn torus_spectrum(k: i64, l: i64) -> Vec<(Branch, f64, SectionVector<Complex64>)> {
    let r = ((k * k + l * l) as f64).sqrt();
    let root = (2.0 * std::f64::consts::PI).sqrt();
    if r == 0.0 {
        return vec![
            (
                Branch::Plus,
                0.0,
                SectionVector::basis(2, ModeIndex::new(0, 0, 1)),
            ),
            (
                Branch::Minus,
                0.0,
                SectionVector::basis(2, ModeIndex::new(0, 0, 2)),
            ),
        ];
    }
    let w = Complex64::new(l as f64, k as f64) / r;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [Branch::Plus, Branch::Minus]
        .into_iter()
        .map(|b| {
            let v = SectionVector::from_terms(
                2,
                [
                    (ModeIndex::new(k, l, 1), Complex64::new(h, 0.0)),
                    (ModeIndex::new(k, l, 2), w * b.sign() * h),
                ],
            );
            (b, b.sign() * root * r, v)
        })
        .collect()
}

/// Largest `‖Dv - μv‖` over `|k|, |l| ≤ n`.
pub fn torus_residual(n: i64) -> f64 {
    let geo = TorusGeometry::<Complex64>::new(TorusParams { theta: 0.0 });
    let d = geo.dirac();
    let env = AtomValues::default();
    let mut worst = 0.0f64;
    for k in -n..=n {
        for l in -n..=n {
            for (_, mu, v) in torus_spectrum(k, l) {
                let r = d
                    .apply_all(&v)
                    .minus(&v.scaled(&Complex64::new(mu, 0.0)))
                    .norm(&env);
                worst = worst.max(r);
            }
        }
    }
    worst
}

fn probes(n: i64) -> Vec<ModeIndex> {
    Window::new(n).modes(2)
}

/// Operator identities of the rotation-algebra calculus.
pub fn torus_relation_suite<S: Scalar>(
    geo: &TorusGeometry<S>,
    n: i64,
    tol: f64,
) -> Vec<RelationReport> {
    let env = geo.env().clone();
    let pr = probes(n);
    let (u, v) = (geo.u(1), geo.v(1));
    let (us, vs) = (geo.star(&u), geo.star(&v));
    let p = |x: &TorusElement<S>| geo.represent(x);
    let (pu, pv, pus, pvs) = (p(&u), p(&v), p(&us), p(&vs));
    let (du, dv, dus, dvs) = (geo.d(&u), geo.d(&v), geo.d(&us), geo.d(&vs));
    let mut out = Vec::new();
    let mut eq = |id: &str, l: BlockOperator<S>, r: BlockOperator<S>| {
        out.push(check_equal(id, &l, &r, &pr, &env, tol))
    };

    eq(
        "UV = e^{-2pi i theta} VU",
        pu.compose(&pv),
        pv.compose(&pu).scale(&geo.phase(-1)),
    );
    eq("U U* = 1", pu.compose(&pus), BlockOperator::identity(2));
    eq("V* V = 1", pvs.compose(&pv), BlockOperator::identity(2));
    // same-generator relations
    for (name, a, b, da, db) in [("u", &pu, &pus, &du, &dus), ("v", &pv, &pvs, &dv, &dvs)] {
        eq(
            &format!("{name} d{name} = d{name} {name}"),
            a.compose(da),
            da.compose(a),
        );
        eq(
            &format!("{name}* d{name} = d{name} {name}*"),
            b.compose(da),
            da.compose(b),
        );
        eq(
            &format!("{name} d{name}* = d{name}* {name}"),
            a.compose(db),
            db.compose(a),
        );
        eq(
            &format!("{name}* d{name}* = d{name}* {name}*"),
            b.compose(db),
            db.compose(b),
        );
    }
    eq(
        "v du = e^{2pi i theta} du v",
        pv.compose(&du),
        du.compose(&pv).scale(&geo.phase(1)),
    );
    eq(
        "u dv = e^{-2pi i theta} dv u",
        pu.compose(&dv),
        dv.compose(&pu).scale(&geo.phase(-1)),
    );
    eq(
        "v du* = e^{-2pi i theta} du* v",
        pv.compose(&dus),
        dus.compose(&pv).scale(&geo.phase(-1)),
    );
    eq(
        "u* dv = e^{2pi i theta} dv u*",
        pus.compose(&dv),
        dv.compose(&pus).scale(&geo.phase(1)),
    );
    eq(
        "v* du = e^{-2pi i theta} du v*",
        pvs.compose(&du),
        du.compose(&pvs).scale(&geo.phase(-1)),
    );
    eq(
        "u dv* = e^{2pi i theta} dv* u",
        pu.compose(&dvs),
        dvs.compose(&pu).scale(&geo.phase(1)),
    );
    eq(
        "du dv = -e^{-2pi i theta} dv du",
        du.compose(&dv),
        dv.compose(&du).scale(&-geo.phase(-1)),
    );
    // squares land in the algebra, so they are junk in degree two
    let two_pi = S::root_two_pi(2);
    eq(
        "[D,U]^2 = 2pi U^2",
        du.compose(&du),
        pu.compose(&pu).scale(&two_pi),
    );
    eq(
        "[D,V]^2 = 2pi V^2",
        dv.compose(&dv),
        pv.compose(&pv).scale(&two_pi),
    );
    eq(
        "[D,U*]^2 = 2pi U*^2",
        dus.compose(&dus),
        pus.compose(&pus).scale(&two_pi),
    );
    eq(
        "[D,V*]^2 = 2pi V*^2",
        dvs.compose(&dvs),
        pvs.compose(&pvs).scale(&two_pi),
    );
    eq(
        "[D,U*] = -U* [D,U] U*",
        dus.clone(),
        pus.compose(&du).compose(&pus).neg(),
    );
    // [D,U][D,V] e^± = ∓2πi e^{2πikθ} e^±_{k+1,l+1}
    let grading = BlockOperator::block(mat_entries(2, &[(0, 0, -1), (1, 1, 1)]), (0, 0), None);
    let uv = pu
        .compose(&pv)
        .compose(&grading)
        .scale(&(S::root_two_pi(2) * S::i()));
    eq(
        "[D,U][D,V] = -2pi i (UV) (x) diag(1,-1)",
        du.compose(&dv),
        uv,
    );
    let d = geo.dirac();
    let partial = geo
        .delta1()
        .sub(&geo.delta2().scale(&S::i()))
        .scale(&S::root_two_pi(-1));
    let lower = BlockOperator::block(mat_entries(2, &[(1, 0, 1)]), (0, 0), None);
    let upper = BlockOperator::block(mat_entries(2, &[(0, 1, 1)]), (0, 0), None);
    // ∂* = -(δ₁ + iδ₂)/√(2π) since each δ_j is anti-Hermitian
    let partial_star = geo
        .delta1()
        .add(&geo.delta2().scale(&S::i()))
        .scale(&-S::root_two_pi(-1));
    eq(
        "D = (delta1 - i delta2)/sqrt(2pi) on + -> -, its adjoint on - -> +",
        d,
        lower.compose(&partial).add(&upper.compose(&partial_star)),
    );
    out
}

/// `δ_j(xy) = δ_j(x) y + x δ_j(y)` on random elements, exact when `S` is.
pub fn derivation_report<S: Scalar>(
    geo: &TorusGeometry<S>,
    samples: usize,
    seed: u64,
) -> RelationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut structural = true;
    for _ in 0..samples {
        let x = random_torus_element(geo, &mut rng);
        let y = random_torus_element(geo, &mut rng);
        for j in [1u8, 2] {
            let lhs = geo.derivation(j, &geo.multiply(&x, &y));
            let rhs = geo
                .multiply(&geo.derivation(j, &x), &y)
                .add(&geo.multiply(&x, &geo.derivation(j, &y)));
            let diff = lhs.add(&rhs.scale(&-S::one()));
            structural &= diff.is_zero();
            for (_, c) in diff.terms() {
                worst = worst.max(c.approx(geo.env()).norm());
            }
        }
    }
    let status = if structural && S::SYMBOLIC_PHASES {
        Status::Exact
    } else if worst <= 1e-10 {
        Status::WithinTolerance
    } else {
        Status::Violated
    };
    RelationReport::new("delta_1, delta_2 are derivations", status, worst)
}

pub fn random_torus_element<S: Scalar>(
    geo: &TorusGeometry<S>,
    rng: &mut impl Rng,
) -> TorusElement<S> {
    let _ = geo;
    let mut x = TorusElement::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let c = S::from_gauss(&gauss(
            rat(rng.gen_range(-4..=4), rng.gen_range(1..=3)),
            rat(rng.gen_range(-2..=2), 1),
        ));
        x.push((rng.gen_range(-3..=3), rng.gen_range(-3..=3)), c);
    }
    x
}
/// First-order freeness: `α = p UⁿV^{m+1}[D,U] + q U^{n+1}V^m[D,V]` on `e^+_{00}` and `e^-_{00}`
/// gives a 2×2 system in `(p, q)` whose determinant must not vanish.
/// values of `k` gives a 2×2 system in `(p, q)` whose determinant must not vanish.
pub fn torus_freeness<S: Scalar>(geo: &TorusGeometry<S>, range: i64) -> RelationReport {
    let env = geo.env().clone();
    let (du, dv) = (geo.d(&geo.u(1)), geo.d(&geo.v(1)));
    let mut worst_min = f64::INFINITY;
    let mut ok = true;
    let mut witness = None;
    for nn in -range..=range {
        for m in -range..=range {
            let a_op = geo
                .represent(&geo.multiply(&geo.u(nn), &geo.v(m + 1)))
                .compose(&du);
            let b_op = geo
                .represent(&geo.multiply(&geo.u(nn + 1), &geo.v(m)))
                .compose(&dv);
            // the ratio of the two coefficients is k-independent but flips sign between e^+ and e^-
            let coeffs = |comp: u8| {
                let e = ModeIndex::new(0, 0, comp);
                let t = ModeIndex::new(nn + 1, m + 1, 3 - comp);
                (a_op.apply_mode(e).get(&t), b_op.apply_mode(e).get(&t))
            };
            let ((a1, b1), (a2, b2)) = (coeffs(1), coeffs(2));
            let det = a1 * b2 - a2 * b1;
            let mag = det.approx(&env).norm();
            worst_min = worst_min.min(mag);
            let nonzero = if S::SYMBOLIC_PHASES {
                !det.is_zero()
            } else {
                mag > 1e-12
            };
            if !nonzero {
                ok = false;
                witness.get_or_insert(ModeIndex::new(nn, m, 1));
            }
        }
    }
    let status = match (ok, S::SYMBOLIC_PHASES) {
        (false, _) => Status::Violated,
        (true, true) => Status::Exact,
        (true, false) => Status::WithinTolerance,
    };
    RelationReport::new("two-term freeness determinants", status, worst_min)
        .with_witness(witness)
        .with_detail(format!(
            "min |det| = {worst_min:.3e} at θ = {}",
            geo.params().theta
        ))
}

/// `π(a)[D,U][D,V]` has opposite entries on `e^+` and `e^-`, while every
/// `π(b)` has equal ones; a nonzero `a` therefore never produces an algebra element.
pub fn torus_two_form_separation<S: Scalar>(
    geo: &TorusGeometry<S>,
    samples: usize,
    seed: u64,
    n: i64,
) -> RelationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dudv = geo.d(&geo.u(1)).compose(&geo.d(&geo.v(1)));
    let mut ok = true;
    let mut exact = S::SYMBOLIC_PHASES;
    for _ in 0..samples {
        let a = random_torus_element(geo, &mut rng);
        let form = geo.represent(&a).compose(&dudv);
        for &(k, l) in a.terms().map(|(kl, _)| kl).collect::<Vec<_>>().iter() {
            for m in Window::new(n).modes(1) {
                let f = form.fiber(m.k, m.l, (k + 1, l + 1));
                let env = geo.env();
                let zero = |x: &S| {
                    if S::SYMBOLIC_PHASES {
                        x.is_zero()
                    } else {
                        x.approx(env).norm() < 1e-9
                    }
                };
                let opposite = zero(&(f[0][0].clone() + f[1][1].clone()));
                let off = zero(&f[0][1]) && zero(&f[1][0]);
                let nonzero = !zero(&f[0][0]);
                if !S::SYMBOLIC_PHASES {
                    exact = false;
                }
                ok &= opposite && off && nonzero;
            }
        }
    }
    RelationReport::from_bool("two-form separation from the algebra", ok, exact, 0.0)
}

/// Degree ≥ 3 words in `du, dv` with algebra coefficients reduce to zero:
/// coefficients move left (`du·u^kv^l = e^{-2πilθ} u^kv^l du`, `dv·u^kv^l = e^{2πikθ} u^kv^l dv`),
/// then `dv du = -e^{2πiθ} du dv` sorts the differentials and a repeat kills the word.
/// The operator of each word is compared with the rewritten product.
pub fn torus_higher_degree<S: Scalar>(
    geo: &TorusGeometry<S>,
    words: usize,
    seed: u64,
    n: i64,
) -> RelationReport {
    let env = geo.env().clone();
    let pr = probes(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = [geo.d(&geo.u(1)), geo.d(&geo.v(1))];
    let mut ok = true;
    let mut structural = true;
    let mut worst = 0.0f64;
    let mut vanished = 0;
    for _ in 0..words {
        let degree = rng.gen_range(3..=4);
        // letters: Some(x) algebra, None+j differential
        let mut word: Vec<Result<TorusElement<S>, usize>> = Vec::new();
        for _ in 0..degree {
            if rng.gen_bool(0.5) {
                word.push(Ok(random_torus_element(geo, &mut rng)));
            }
            word.push(Err(rng.gen_range(0..2)));
        }
        let mut coeff = TorusElement::monomial(S::one(), 0, 0);
        let mut ds: Vec<usize> = Vec::new();
        for letter in &word {
            match letter {
                Ok(x) => {
                    let mut moved = TorusElement::zero();
                    for (&(k, l), c) in x.terms() {
                        let q: i64 = ds.iter().map(|&j| if j == 0 { -l } else { k }).sum();
                        moved.push((k, l), c.clone() * geo.phase(q));
                    }
                    coeff = geo.multiply(&coeff, &moved);
                }
                Err(j) => ds.push(*j),
            }
        }
        let mut scalar = S::one();
        for i in 0..ds.len() {
            for j in 0..ds.len() - 1 - i {
                if ds[j] > ds[j + 1] {
                    ds.swap(j, j + 1);
                    scalar = scalar * -geo.phase(1);
                }
            }
        }
        if ds.windows(2).any(|w| w[0] == w[1]) {
            vanished += 1;
        } else {
            ok = false;
        }
        for m in &pr {
            let mut lhs = SectionVector::basis(2, *m);
            for letter in word.iter().rev() {
                let op = match letter {
                    Ok(x) => geo.represent(x),
                    Err(j) => d[*j].clone(),
                };
                lhs = op.apply_all(&lhs);
            }
            let mut rhs = SectionVector::basis(2, *m);
            for &j in ds.iter().rev() {
                rhs = d[j].apply_all(&rhs);
            }
            rhs = geo.represent(&coeff.scale(&scalar)).apply_all(&rhs);
            let diff = lhs.minus(&rhs);
            structural &= diff.is_empty();
            worst = worst.max(diff.max_abs(&env));
        }
    }
    let status = if !ok || worst > 1e-9 {
        Status::Violated
    } else if structural && S::SYMBOLIC_PHASES {
        Status::Exact
    } else {
        Status::WithinTolerance
    };
    RelationReport::new(
        "rotation-algebra forms of degree >= 3 vanish",
        status,
        worst,
    )
    .with_detail(format!("{vanished}/{words} words reduce to zero"))
}

/// Weyl count of `|D|`: eigenvalues `√(2π)√(k²+l²)`, two per lattice point.
pub fn torus_dimension(r_min: f64, r_max: f64, points: usize) -> WeylCount {
    let dummy = FoliationParams::numeric(1.0, 0.0).expect("valid parameters");
    weyl_count(CountedOperator::Torus, &dummy, r_min, r_max, points)
}

/// Kernel check `D e^±_{00} = 0`.
pub fn kernel_report<S: Scalar>(geo: &TorusGeometry<S>) -> RelationReport {
    let d = geo.dirac();
    let pr = [ModeIndex::new(0, 0, 1), ModeIndex::new(0, 0, 2)];
    check_zero("D e_00 = 0", &d, &pr, geo.env(), 0.0)
}

/// Everything the `verify torus` suite reports.
pub fn full_torus_suite<S: Scalar>(
    geo: &TorusGeometry<S>,
    n: i64,
    tol: f64,
    seed: u64,
) -> Vec<RelationReport> {
    let mut out = torus_relation_suite(geo, n, tol);
    out.push(kernel_report(geo));
    out.push(derivation_report(geo, 20, seed));
    out.push(torus_freeness(geo, 3));
    out.push(torus_two_form_separation(geo, 20, seed, 2));
    out.push(torus_higher_degree(geo, 100, seed, 1));
    out
}
