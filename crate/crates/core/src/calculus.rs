//! Differential calculi of the two spectral triples.
//!
//! Universal forms `a₀ da₁ ⋯ da_n` are kept as words and evaluated through
//! `π^n`, which replaces every `d` by a commutator with the chosen operator.
//! Relations are then checked as operator identities on probe modes.
//!
//! Writing `C_j = [Q̃, U_j]` for the operators built here, `C_j = i·M_j ⊗ s_j`
//! with real `M_j`, so the usual real displays describe `-i C_j`. Both the
//! honest identity `C_j² = U_j²` and the display form `(-iC_j)² = -U_j²` are
//! reported.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, FoliationParams, Kronecker, Time};
use crate::exact::{gauss, rat, GaussRat};
use crate::hankel;
use crate::hilbert::{
    check_equal, check_zero, mat_entries, Assembled, BlockOperator, Geometry, ModeIndex,
    SectionVector, Window,
};
use crate::precise::HpComplex;
use crate::report::{RelationReport, Status};
use crate::scalar::{NumericScalar, PhaseAtom, PhaseExponent, Scalar};
use crate::spectral::{eta, gamma, root_lambda_gamma, Branch};
use crate::Result;

/// Which operator the differential is taken with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OpKind {
    Qtilde,
    Dirac,
}

/// One letter of a universal form.
#[derive(Debug, Clone)]
pub enum Factor<S: Scalar> {
    Elem(AlgebraElement<S>),
    D(AlgebraElement<S>),
}

/// A universal form, read left to right.
#[derive(Debug, Clone)]
pub struct FormWord<S: Scalar> {
    pub factors: Vec<Factor<S>>,
}

impl<S: Scalar> FormWord<S> {
    pub fn new(factors: Vec<Factor<S>>) -> Self {
        Self { factors }
    }

    /// Number of differentials.
    pub fn degree(&self) -> usize {
        self.factors
            .iter()
            .filter(|f| matches!(f, Factor::D(_)))
            .count()
    }
}

/// `π^n`: each `dx` becomes `[op, π(x)]`, each `x` becomes `π(x)`.
pub fn pi_eval<S: Scalar>(
    geo: &Geometry<S>,
    w: &FormWord<S>,
    op: &BlockOperator<S>,
) -> BlockOperator<S> {
    let mut acc = BlockOperator::identity(Geometry::<S>::DIM);
    for f in &w.factors {
        let next = match f {
            Factor::Elem(x) => geo.represent(x),
            Factor::D(x) => geo.commutator(op, x),
        };
        acc = acc.compose(&next);
    }
    acc
}

/// The operator behind `kind`.
pub fn operator<S: NumericScalar>(geo: &Geometry<S>, kind: OpKind) -> BlockOperator<S> {
    match kind {
        OpKind::Qtilde => geo.assemble(Assembled::Qtilde),
        OpKind::Dirac => geo.dirac(),
    }
}

/// `e^{i a_j t}` with `a₁ = a`, `a₂ = b`.
fn generator_phase<S: Scalar>(ctx: &Kronecker<S>, j: u8, t: &Time) -> S {
    if j == 1 {
        ctx.mode_phase(t, 1, 0)
    } else {
        ctx.mode_phase(t, 0, 1)
    }
}

fn probes(n: i64) -> Vec<ModeIndex> {
    Window::new(n).modes(4)
}

/// Random element with up to `terms` monomials, `|k|, |l| ≤ deg` and times
/// drawn from the first two registered symbols.
pub fn random_element<S: Scalar>(
    ctx: &Kronecker<S>,
    rng: &mut impl Rng,
    terms: usize,
    deg: i64,
) -> AlgebraElement<S> {
    let nsym = ctx.registry().len();
    let mut x = ctx.zero();
    for _ in 0..rng.gen_range(1..=terms) {
        let mut t = Time::zero(nsym);
        for m in 0..nsym.min(2) {
            if rng.gen_bool(0.5) {
                t = t.plus(&Time::symbol(
                    nsym,
                    m,
                    rat(rng.gen_range(-3..=3), rng.gen_range(1..=2)),
                ));
            }
        }
        let c = S::from_gauss(&gauss(
            rat(rng.gen_range(-4..=4), rng.gen_range(1..=3)),
            rat(rng.gen_range(-3..=3), 1),
        ));
        let mono = ctx.monomial(c, t, rng.gen_range(-deg..=deg), rng.gen_range(-deg..=deg));
        x = ctx.add(&x, &mono).expect("same registry");
    }
    x
}

/// Algebra relations, both in normal form and as operators.
pub fn check_algebra_relations<S: Scalar>(
    geo: &Geometry<S>,
    n: i64,
    tol: f64,
) -> Result<Vec<RelationReport>> {
    let ctx = geo.ctx();
    let env = geo.env().clone();
    let pr = probes(n);
    let nsym = ctx.registry().len();
    let t = Time::symbol(nsym, 0, BigRational::one());
    let s = if nsym > 1 {
        Time::symbol(nsym, 1, rat(1, 2))
    } else {
        Time::symbol(nsym, 0, rat(-2, 3))
    };
    let (u1, u2, vt, vs) = (ctx.u1(), ctx.u2(), ctx.v(t.clone()), ctx.v(s.clone()));
    let vts = ctx.v(t.plus(&s));
    let one = ctx.one();

    let mut cases: Vec<(&str, AlgebraElement<S>, AlgebraElement<S>)> = Vec::new();
    cases.push((
        "U1 U2 = U2 U1",
        ctx.multiply(&u1, &u2)?,
        ctx.multiply(&u2, &u1)?,
    ));
    let ea = ctx.scale(&generator_phase(ctx, 1, &t), &ctx.multiply(&u1, &vt)?);
    cases.push(("V_t U1 = e^{iat} U1 V_t", ctx.multiply(&vt, &u1)?, ea));
    let eb = ctx.scale(&generator_phase(ctx, 2, &t), &ctx.multiply(&u2, &vt)?);
    cases.push(("V_t U2 = e^{ibt} U2 V_t", ctx.multiply(&vt, &u2)?, eb));
    cases.push(("V_t V_s = V_{t+s}", ctx.multiply(&vt, &vs)?, vts));
    cases.push((
        "U1 U1* = 1",
        ctx.multiply(&u1, &ctx.star(&u1))?,
        one.clone(),
    ));
    cases.push((
        "U2* U2 = 1",
        ctx.multiply(&ctx.star(&u2), &u2)?,
        one.clone(),
    ));
    cases.push(("V_t V_t* = 1", ctx.multiply(&vt, &ctx.star(&vt))?, one));

    let mut out = Vec::new();
    for (id, lhs, rhs) in cases {
        let normal = ctx.equals(&lhs, &rhs)?;
        let op = check_equal(
            id,
            &geo.represent(&lhs),
            &geo.represent(&rhs),
            &pr,
            &env,
            tol,
        );
        let status = if normal { op.status } else { Status::Violated };
        out.push(RelationReport { status, ..op });
    }
    Ok(out)
}

/// Probe times used by the relation suites.
fn probe_times<S: Scalar>(ctx: &Kronecker<S>) -> Vec<Time> {
    let nsym = ctx.registry().len();
    let mut ts = vec![
        Time::symbol(nsym, 0, BigRational::one()),
        Time::symbol(nsym, 0, rat(-3, 2)),
    ];
    if nsym > 1 {
        ts.push(Time::symbol(nsym, 0, rat(1, 3)).plus(&Time::symbol(nsym, 1, rat(2, 1))));
    }
    ts
}

/// Relations of the first-order signature operator `Q̃` as operator identities.
pub fn check_linear_relations<S: Scalar>(
    geo: &Geometry<S>,
    n: i64,
    tol: f64,
    seed: u64,
) -> Result<Vec<RelationReport>> {
    let ctx = geo.ctx();
    let env = geo.env().clone();
    let pr = probes(n);
    let q = geo.assemble(Assembled::Qtilde);
    let u = [ctx.u1(), ctx.u2()];
    let us = [ctx.star(&u[0]), ctx.star(&u[1])];
    let pu = [geo.represent(&u[0]), geo.represent(&u[1])];
    let pus = [geo.represent(&us[0]), geo.represent(&us[1])];
    let c = [geo.commutator(&q, &u[0]), geo.commutator(&q, &u[1])];
    let mut out = Vec::new();

    out.push(check_zero(
        "[Q~, 1] = 0",
        &geo.commutator(&q, &ctx.one()),
        &pr,
        &env,
        tol,
    ));
    for t in probe_times(ctx) {
        out.push(check_zero(
            "[Q~, V_t] = 0",
            &geo.commutator(&q, &ctx.v(t)),
            &pr,
            &env,
            tol,
        ));
    }
    for j in 0..2 {
        for k in 0..2 {
            let id = format!("U{} [Q~,U{}] = [Q~,U{}] U{}", j + 1, k + 1, k + 1, j + 1);
            out.push(check_equal(
                &id,
                &pu[j].compose(&c[k]),
                &c[k].compose(&pu[j]),
                &pr,
                &env,
                tol,
            ));
        }
    }
    for t in probe_times(ctx) {
        let pv = geo.represent(&ctx.v(t.clone()));
        for j in 0..2 {
            let ph = generator_phase(ctx, j as u8 + 1, &t);
            let name = if j == 0 { "a" } else { "b" };
            let id = format!("V_t [Q~,U{}] = e^{{i{name}t}} [Q~,U{}] V_t", j + 1, j + 1);
            out.push(check_equal(
                &id,
                &pv.compose(&c[j]),
                &c[j].compose(&pv).scale(&ph),
                &pr,
                &env,
                tol,
            ));
        }
    }
    let c12 = c[0].compose(&c[1]);
    out.push(check_equal(
        "[Q~,U1][Q~,U2] = -[Q~,U2][Q~,U1]",
        &c12,
        &c[1].compose(&c[0]).neg(),
        &pr,
        &env,
        tol,
    ));
    // (-i C1)(-i C2) = -C1 C2 against the real antidiagonal display
    let display = BlockOperator::block(
        mat_entries(4, &[(0, 3, -1), (1, 2, -1), (2, 1, 1), (3, 0, 1)]),
        (1, 1),
        None,
    );
    out.push(check_equal(
        "(-i[Q~,U1])(-i[Q~,U2]) = antidiagonal (x) s1 s2",
        &c12.neg(),
        &display,
        &pr,
        &env,
        tol,
    ));
    for j in 0..2 {
        let sq = pu[j].compose(&pu[j]);
        let cc = c[j].compose(&c[j]);
        out.push(check_equal(
            &format!("[Q~,U{0}]^2 = U{0}^2", j + 1),
            &cc,
            &sq,
            &pr,
            &env,
            tol,
        ));
        out.push(check_equal(
            &format!("(-i[Q~,U{0}])^2 = -U{0}^2", j + 1),
            &cc.neg(),
            &sq.neg(),
            &pr,
            &env,
            tol,
        ));
        let cs = geo.commutator(&q, &us[j]);
        let red = pus[j].compose(&c[j]).compose(&pus[j]).neg();
        out.push(check_equal(
            &format!("[Q~,U{0}*] = -U{0}* [Q~,U{0}] U{0}*", j + 1),
            &cs,
            &red,
            &pr,
            &env,
            tol,
        ));
        out.push(check_equal(
            &format!("U{0}* [Q~,U{0}] = [Q~,U{0}] U{0}*", j + 1),
            &pus[j].compose(&c[j]),
            &c[j].compose(&pus[j]),
            &pr,
            &env,
            tol,
        ));
    }
    out.push(leibniz_report(
        geo,
        &q,
        "Leibniz rule for d = [Q~, .]",
        n,
        tol,
        seed,
        8,
    )?);
    Ok(out)
}

/// `π(d(xy)) = π(x dy) + π(dx y)` on random pairs.
pub fn leibniz_report<S: Scalar>(
    geo: &Geometry<S>,
    op: &BlockOperator<S>,
    id: &str,
    n: i64,
    tol: f64,
    seed: u64,
    pairs: usize,
) -> Result<RelationReport> {
    let ctx = geo.ctx();
    let env = geo.env().clone();
    let pr = Window::new(n).interior(4, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc: Option<RelationReport> = None;
    for _ in 0..pairs {
        let x = random_element(ctx, &mut rng, 2, 2);
        let y = random_element(ctx, &mut rng, 2, 2);
        let xy = ctx.multiply(&x, &y)?;
        let lhs = pi_eval(geo, &FormWord::new(vec![Factor::D(xy)]), op);
        let r1 = pi_eval(
            geo,
            &FormWord::new(vec![Factor::Elem(x.clone()), Factor::D(y.clone())]),
            op,
        );
        let r2 = pi_eval(geo, &FormWord::new(vec![Factor::D(x), Factor::Elem(y)]), op);
        let rep = check_equal(id, &lhs, &r1.add(&r2), &pr, &env, tol);
        acc = Some(match acc {
            None => rep,
            Some(prev) => merge(prev, rep),
        });
    }
    Ok(acc.unwrap_or_else(|| RelationReport::new(id, Status::Exact, 0.0)))
}

fn merge(a: RelationReport, b: RelationReport) -> RelationReport {
    let status = a.status.meet(b.status);
    let (worst, witness) = if b.max_residual > a.max_residual {
        (b.max_residual, b.witness)
    } else {
        (a.max_residual, a.witness)
    };
    RelationReport {
        id: a.id,
        status,
        max_residual: worst,
        witness: witness.or(a.witness),
        detail: a.detail.or(b.detail),
    }
}

/// Relations of the Dirac operator: `[D, V_t] = 0`, the `V_t` twist of `[D, U_j]`,
/// the unitarity reduction of `[D, U_j*]` and the Leibniz rule.
pub fn check_dirac_relations<S: NumericScalar>(
    geo: &Geometry<S>,
    n: i64,
    tol: f64,
    seed: u64,
) -> Result<Vec<RelationReport>> {
    let ctx = geo.ctx();
    let env = geo.env().clone();
    let pr = probes(n);
    let d = geo.dirac();
    let u = [ctx.u1(), ctx.u2()];
    let c = [geo.commutator(&d, &u[0]), geo.commutator(&d, &u[1])];
    let mut out = Vec::new();
    for t in probe_times(ctx) {
        let vt = ctx.v(t.clone());
        out.push(check_zero(
            "[D, V_t] = 0",
            &geo.commutator(&d, &vt),
            &pr,
            &env,
            tol,
        ));
        let pv = geo.represent(&vt);
        for j in 0..2 {
            let ph = generator_phase(ctx, j as u8 + 1, &t);
            let name = if j == 0 { "a" } else { "b" };
            let id = format!("V_t [D,U{}] = e^{{i{name}t}} [D,U{}] V_t", j + 1, j + 1);
            out.push(check_equal(
                &id,
                &pv.compose(&c[j]),
                &c[j].compose(&pv).scale(&ph),
                &pr,
                &env,
                tol,
            ));
        }
    }
    for j in 0..2 {
        let us = ctx.star(&u[j]);
        let pus = geo.represent(&us);
        let red = pus.compose(&c[j]).compose(&pus).neg();
        out.push(check_equal(
            &format!("[D,U{0}*] = -U{0}* [D,U{0}] U{0}*", j + 1),
            &geo.commutator(&d, &us),
            &red,
            &pr,
            &env,
            tol,
        ));
    }
    out.push(leibniz_report(
        geo,
        &d,
        "Leibniz rule for d = [D, .]",
        n,
        tol,
        seed,
        6,
    )?);
    Ok(out)
}

/// Evidence produced by a freeness certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreenessReport {
    pub id: String,
    pub status: Status,
    pub cases: usize,
    /// Smallest determinant modulus (or off-pattern entry count for Ω²).
    pub min_abs: f64,
    pub max_abs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl FreenessReport {
    pub fn passed(&self) -> bool {
        self.status.passed()
    }
}

/// Modulus-one test for an exact single-phase scalar; numeric otherwise.
fn unit_modulus<S: Scalar>(x: &S, env: &crate::scalar::AtomValues) -> (bool, bool, f64) {
    let approx = x.approx(env).norm();
    if S::SYMBOLIC_PHASES && S::EXACT_COEFFS {
        let parts = x.to_parts();
        if parts.len() == 1 {
            if let crate::scalar::CoeffValue::Exact(c) = &parts[0].1 {
                let n2 = &c.re * &c.re + &c.im * &c.im;
                return (n2.is_one(), true, approx);
            }
        }
        return (false, true, approx);
    }
    ((approx - 1.0).abs() <= 1e-12, false, approx)
}

/// First-order freeness: acting with `x V_t U₁ⁱU₂ʲ[Q̃,U₁] + y V_{t'} U₁^{i+1}U₂^{j-1}[Q̃,U₂]`
/// on `e¹_{kl}` lands on `(e², e³)` of one mode; the 2×2 coefficient matrix must have
/// determinant of modulus `a² + b² = 1`.
pub fn freeness_omega1<S: Scalar>(
    geo: &Geometry<S>,
    ij_range: i64,
    n: i64,
) -> Result<FreenessReport> {
    if ij_range < 0 || n < 0 {
        return Err(crate::Error::DegenerateProbe("empty probe family".into()));
    }
    let ctx = geo.ctx();
    let env = geo.env().clone();
    let q = geo.assemble(Assembled::Qtilde);
    let c1 = geo.commutator(&q, &ctx.u1());
    let c2 = geo.commutator(&q, &ctx.u2());
    let times = probe_times(ctx);
    let mut jobs = Vec::new();
    for i in -ij_range..=ij_range {
        for j in -ij_range..=ij_range {
            for (ti, t) in times.iter().enumerate() {
                let t2 = &times[(ti + 1) % times.len()];
                jobs.push((i, j, t.clone(), t2.clone()));
            }
        }
    }
    let modes: Vec<(i64, i64)> = Window::new(n).modes(1).iter().map(|m| (m.k, m.l)).collect();
    let results: Vec<(bool, bool, f64, String)> = jobs
        .par_iter()
        .flat_map_iter(|(i, j, t, t2)| {
            let a_op = geo
                .represent(&ctx.monomial(S::one(), t.clone(), *i, *j))
                .compose(&c1);
            let b_op = geo
                .represent(&ctx.monomial(S::one(), t2.clone(), i + 1, j - 1))
                .compose(&c2);
            let env = env.clone();
            modes.clone().into_iter().map(move |(k, l)| {
                let e1 = ModeIndex::new(k, l, 1);
                let (ia, ib) = (a_op.apply_mode(e1), b_op.apply_mode(e1));
                let tgt = |c| ModeIndex::new(k + i + 1, l + j, c);
                let det = ia.get(&tgt(2)) * ib.get(&tgt(3)) - ib.get(&tgt(2)) * ia.get(&tgt(3));
                let only_target = ia.len() <= 2 && ib.len() <= 2;
                let (ok, exact, m) = unit_modulus(&det, &env);
                (
                    ok && only_target,
                    exact,
                    m,
                    format!("i={i}, j={j}, k={k}, l={l}"),
                )
            })
        })
        .collect();
    Ok(summarize("first-order freeness determinants", results))
}

fn summarize(id: &str, results: Vec<(bool, bool, f64, String)>) -> FreenessReport {
    let ok = results.iter().all(|r| r.0);
    let exact = results.iter().all(|r| r.1);
    let min_abs = results.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    let max_abs = results.iter().map(|r| r.2).fold(0.0, f64::max);
    let witness = results.iter().find(|r| !r.0).map(|r| r.3.clone());
    let status = match (results.is_empty() || ok, exact) {
        (false, _) => Status::Violated,
        (true, true) => Status::Exact,
        (true, false) => Status::WithinTolerance,
    };
    FreenessReport {
        id: id.into(),
        status,
        cases: results.len(),
        min_abs,
        max_abs,
        witness,
    }
}

/// Second-order separation: `π(a)` is diagonal in the frame on every shift,
/// while `π(a)[Q̃,U₁][Q̃,U₂]` is antidiagonal; so the latter meets `π(algebra)`
/// only in zero.
pub fn freeness_omega2<S: Scalar>(
    geo: &Geometry<S>,
    samples: usize,
    n: i64,
    seed: u64,
) -> Result<FreenessReport> {
    if samples == 0 {
        return Err(crate::Error::DegenerateProbe("no sample elements".into()));
    }
    let ctx = geo.ctx();
    let env = geo.env().clone();
    let q = geo.assemble(Assembled::Qtilde);
    let c12 = geo
        .commutator(&q, &ctx.u1())
        .compose(&geo.commutator(&q, &ctx.u2()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // random monomials can cancel; the zero element carries no two-form
    let elems: Vec<AlgebraElement<S>> = (0..samples)
        .map(|_| loop {
            let a = random_element(ctx, &mut rng, 4, 3);
            if !a.is_empty() {
                break a;
            }
        })
        .collect();
    let modes: Vec<(i64, i64)> = Window::new(n).modes(1).iter().map(|m| (m.k, m.l)).collect();
    let zero = |x: &S| {
        if S::SYMBOLIC_PHASES {
            x.is_zero()
        } else {
            x.approx(&env).norm() <= 1e-9
        }
    };
    let results: Vec<(bool, bool, f64, String)> = elems
        .par_iter()
        .enumerate()
        .map(|(idx, a)| {
            let pa = geo.represent(a);
            let form = pa.compose(&c12);
            let mut ok = true;
            let mut nonzero = false;
            let mut worst = 0.0f64;
            let shifts: Vec<(i64, i64)> = a.terms().map(|(m, _)| (m.k + 1, m.l + 1)).collect();
            for &(k, l) in &modes {
                for m in a.terms().map(|(m, _)| (m.k, m.l)) {
                    let f = pa.fiber(k, l, m);
                    // algebra fibers: off-diagonal entries vanish, diagonal entries coincide
                    for r in 0..4 {
                        for c in 0..4 {
                            if r != c && !zero(&f[r][c]) {
                                ok = false;
                            }
                        }
                    }
                    if (1..4).any(|r| !zero(&(f[r][r].clone() - f[0][0].clone()))) {
                        ok = false;
                    }
                }
                for &sh in &shifts {
                    let f = form.fiber(k, l, sh);
                    for r in 0..4 {
                        for c in 0..4 {
                            let v = f[r][c].approx(&env).norm();
                            if c == 3 - r {
                                nonzero |= v > 0.0;
                            } else if !zero(&f[r][c]) {
                                ok = false;
                                worst = worst.max(v);
                            }
                        }
                    }
                }
            }
            (
                ok && nonzero,
                S::SYMBOLIC_PHASES,
                worst,
                format!("sample {idx}"),
            )
        })
        .collect();
    Ok(summarize(
        "two-form diagonal/antidiagonal separation",
        results,
    ))
}

/// Letter of a word in the generators' differentials.
#[derive(Debug, Clone)]
pub enum Letter<S: Scalar> {
    Elem(AlgebraElement<S>),
    /// `du_j`, `j ∈ {1, 2}`.
    Du(u8),
    /// `d(u_j*)`.
    DuStar(u8),
    Dv(Time),
}

/// Result of the symbolic reduction `a · du_{j₁} ⋯ du_{j_n}` with sorted indices.
#[derive(Debug, Clone)]
pub struct Reduced<S: Scalar> {
    pub coeff: AlgebraElement<S>,
    pub sign: i64,
    pub differentials: Vec<u8>,
    /// A repeated differential (or a `dv_t`) makes the class zero.
    pub vanishes: bool,
}

/// Moves every algebra letter to the left (`du_j u_k = u_k du_j`,
/// `du_j v_t = e^{-i a_j t} v_t du_j`), expands `d(u_j*) = -u_j* du_j u_j*`,
/// then sorts the differentials using `du₁du₂ = -du₂du₁`.
pub fn reduce_word<S: Scalar>(ctx: &Kronecker<S>, word: &[Letter<S>]) -> Result<Reduced<S>> {
    let mut expanded = Vec::new();
    let mut vanishes = false;
    for l in word {
        match l {
            Letter::DuStar(j) => {
                let u = if *j == 1 { ctx.u1() } else { ctx.u2() };
                let us = ctx.star(&u);
                expanded.push(Letter::Elem(ctx.scale(&-S::one(), &us)));
                expanded.push(Letter::Du(*j));
                expanded.push(Letter::Elem(us));
            }
            Letter::Dv(_) => vanishes = true,
            other => expanded.push(other.clone()),
        }
    }
    let mut coeff = ctx.one();
    let mut ds: Vec<u8> = Vec::new();
    for l in expanded {
        match l {
            Letter::Elem(x) => {
                let mut moved = x;
                for &j in &ds {
                    moved = twist(ctx, &moved, j);
                }
                coeff = ctx.multiply(&coeff, &moved)?;
            }
            Letter::Du(j) => ds.push(j),
            _ => unreachable!(),
        }
    }
    let mut sign = 1;
    for i in 0..ds.len() {
        for j in 0..ds.len() - 1 - i {
            if ds[j] > ds[j + 1] {
                ds.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    vanishes |= ds.windows(2).any(|w| w[0] == w[1]);
    Ok(Reduced {
        coeff,
        sign,
        differentials: ds,
        vanishes,
    })
}

/// `du_j x = twist(x) du_j`.
fn twist<S: Scalar>(ctx: &Kronecker<S>, x: &AlgebraElement<S>, j: u8) -> AlgebraElement<S> {
    let mut out = ctx.zero();
    for (m, c) in x.terms() {
        let ph = generator_phase(ctx, j, &m.t.negated());
        out = ctx
            .add(&out, &ctx.monomial(c.clone() * ph, m.t.clone(), m.k, m.l))
            .expect("same registry");
    }
    out
}

fn letter_operator<S: Scalar>(
    geo: &Geometry<S>,
    q: &BlockOperator<S>,
    l: &Letter<S>,
) -> BlockOperator<S> {
    let ctx = geo.ctx();
    let gen = |j: u8| if j == 1 { ctx.u1() } else { ctx.u2() };
    match l {
        Letter::Elem(x) => geo.represent(x),
        Letter::Du(j) => geo.commutator(q, &gen(*j)),
        Letter::DuStar(j) => geo.commutator(q, &ctx.star(&gen(*j))),
        Letter::Dv(t) => geo.commutator(q, &ctx.v(t.clone())),
    }
}

/// Image of `e_m` under the product `ops[0] ∘ ops[1] ∘ ⋯`, applied right to left.
fn apply_chain<S: Scalar>(ops: &[BlockOperator<S>], m: ModeIndex) -> SectionVector<S> {
    let mut v = SectionVector::basis(4, m);
    for op in ops.iter().rev() {
        v = op.apply_all(&v);
    }
    v
}

/// Like [`check_equal`] for products given as factor lists, without forming the product.
fn check_chains_equal<S: Scalar>(
    id: &str,
    lhs: &[BlockOperator<S>],
    rhs: &[BlockOperator<S>],
    probes: &[ModeIndex],
    env: &crate::scalar::AtomValues,
    tol: f64,
) -> RelationReport {
    let mut structural = true;
    let (mut worst, mut witness) = (0.0f64, None);
    for &m in probes {
        let d = apply_chain(lhs, m).minus(&apply_chain(rhs, m));
        structural &= d.is_empty();
        let r = d.max_abs(env);
        if r > worst {
            worst = r;
            witness = Some(m);
        }
    }
    let status = if structural && S::SYMBOLIC_PHASES {
        Status::Exact
    } else if worst <= tol {
        Status::WithinTolerance
    } else {
        Status::Violated
    };
    RelationReport::new(id, status, worst).with_witness(if status == Status::Violated {
        witness
    } else {
        None
    })
}

/// Random words of degree `3..=4` in `du₁, du₂, d(u_j*)`, `dv_t` with algebra
/// coefficients. Each must reduce symbolically to zero, and `π(word)` must equal
/// the operator of the reduced (unsorted-junk) form, checked exactly.
pub fn higher_degree_vanishing<S: Scalar>(
    geo: &Geometry<S>,
    words: usize,
    n: i64,
    seed: u64,
) -> Result<RelationReport> {
    let ctx = geo.ctx();
    let env = geo.env().clone();
    let q = geo.assemble(Assembled::Qtilde);
    let pr = probes(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all = Vec::new();
    for _ in 0..words {
        let degree = rng.gen_range(3..=4);
        let mut w = Vec::new();
        for _ in 0..degree {
            if rng.gen_bool(0.5) {
                w.push(Letter::Elem(random_element(ctx, &mut rng, 2, 2)));
            }
            let r: f64 = rng.gen();
            w.push(if r < 0.4 {
                Letter::Du(1)
            } else if r < 0.8 {
                Letter::Du(2)
            } else if r < 0.95 {
                Letter::DuStar(rng.gen_range(1..=2))
            } else {
                Letter::Dv(probe_times(ctx)[0].clone())
            });
        }
        if rng.gen_bool(0.5) {
            w.push(Letter::Elem(random_element(ctx, &mut rng, 2, 2)));
        }
        all.push(w);
    }
    let c = [geo.commutator(&q, &ctx.u1()), geo.commutator(&q, &ctx.u2())];
    let results: Vec<Result<(bool, RelationReport)>> = all
        .par_iter()
        .enumerate()
        .map(|(idx, w)| {
            let red = reduce_word(ctx, w)?;
            let direct: Vec<BlockOperator<S>> =
                w.iter().map(|l| letter_operator(geo, &q, l)).collect();
            let has_dv = w.iter().any(|l| matches!(l, Letter::Dv(_)));
            let rebuilt: Vec<BlockOperator<S>> = if has_dv {
                vec![BlockOperator::zero(4)]
            } else {
                let mut ops = vec![geo.represent(&red.coeff).scale(&S::from_int(red.sign))];
                ops.extend(
                    red.differentials
                        .iter()
                        .map(|&j| c[(j - 1) as usize].clone()),
                );
                ops
            };
            let rep =
                check_chains_equal(&format!("word {idx}"), &direct, &rebuilt, &pr, &env, 1e-9);
            Ok((red.vanishes, rep))
        })
        .collect();
    let mut status = Status::Exact;
    let mut worst = 0.0f64;
    let mut vanished = 0;
    let mut witness = None;
    let mut failed_word = None;
    for (idx, r) in results.into_iter().enumerate() {
        let (v, rep) = r?;
        if v {
            vanished += 1;
        } else {
            status = Status::Violated;
            failed_word.get_or_insert(idx);
        }
        status = status.meet(rep.status);
        if rep.max_residual > worst {
            worst = rep.max_residual;
        }
        if rep.witness.is_some() && witness.is_none() {
            witness = rep.witness;
            failed_word.get_or_insert(idx);
        }
    }
    let mut detail = format!("{vanished}/{words} words reduce to zero");
    if let Some(i) = failed_word {
        detail.push_str(&format!("; first failure at word {i}"));
    }
    Ok(
        RelationReport::new("forms of degree >= 3 vanish", status, worst)
            .with_witness(witness)
            .with_detail(detail),
    )
}

/// Predicted value of `U₁ʳU₂ᵖ[D, U₁ˢU₂ᵍ] η_{kl±}`.
///
/// With `' = (k+s, l+q)`, `'' = (k+r+s, l+p+q)` and `g = √λ γ₊`:
/// `η₊ ↦ (g' - g)/γ'' · η''₋` and `η₋ ↦ (√λ'γ - √λγ')/γ' · η''₊`.
pub fn dirac_commutator_table(
    p: &FoliationParams,
    (r, pp, s, q): (i64, i64, i64, i64),
    k: i64,
    l: i64,
    family: u8,
    branch: Branch,
) -> SectionVector<Complex64> {
    let (k1, l1) = (k + s, l + q);
    let (k2, l2) = (k + r + s, l + pp + q);
    let coeff = match branch {
        Branch::Plus => {
            (root_lambda_gamma(p, k1, l1) - root_lambda_gamma(p, k, l))
                / gamma(p, k2, l2, Branch::Plus)
        }
        Branch::Minus => {
            let (sl, sl1) = (
                crate::spectral::mixed_lambda(p, k, l).sqrt(),
                crate::spectral::mixed_lambda(p, k1, l1).sqrt(),
            );
            let (g, g1) = (gamma(p, k, l, Branch::Plus), gamma(p, k1, l1, Branch::Plus));
            (g * sl1 - g1 * sl) / g1
        }
    };
    eta(p, family, k2, l2, branch.flip()).scaled(&coeff)
}

/// Cross-checks [`dirac_commutator_table`] against the composed operators.
pub fn dirac_table_report(
    geo: &Geometry<Complex64>,
    range: i64,
    n: i64,
    tol: f64,
) -> Result<RelationReport> {
    let ctx = geo.ctx();
    let p = ctx.params().clone();
    let d = geo.dirac();
    let mut tuples = Vec::new();
    for r in -range..=range {
        for pp in -range..=range {
            for s in -range..=range {
                for q in -range..=range {
                    tuples.push((r, pp, s, q));
                }
            }
        }
    }
    let modes: Vec<(i64, i64)> = Window::new(n).modes(1).iter().map(|m| (m.k, m.l)).collect();
    let results: Vec<(f64, ModeIndex)> = tuples
        .par_iter()
        .map(|&(r, pp, s, q)| {
            let left = geo.represent(&ctx.u(r, pp));
            let op = left.compose(&geo.commutator(&d, &ctx.u(s, q)));
            let mut worst = (0.0f64, ModeIndex::new(0, 0, 1));
            for &(k, l) in &modes {
                for family in [1u8, 2] {
                    for branch in [Branch::Plus, Branch::Minus] {
                        let lhs = op.apply_all(&eta(&p, family, k, l, branch));
                        let rhs = dirac_commutator_table(&p, (r, pp, s, q), k, l, family, branch);
                        let res = lhs.minus(&rhs).norm(&Default::default());
                        if res > worst.0 {
                            worst = (res, ModeIndex::new(k, l, family));
                        }
                    }
                }
            }
            worst
        })
        .collect();
    let (worst, witness) =
        results.into_iter().fold(
            (0.0, None),
            |acc, (r, m)| if r > acc.0 { (r, Some(m)) } else { acc },
        );
    let status = if worst <= tol {
        Status::WithinTolerance
    } else {
        Status::Violated
    };
    Ok(
        RelationReport::new("U1^r U2^p [D, U1^s U2^q] on the eta basis", status, worst)
            .with_witness(if status == Status::Violated {
                witness
            } else {
                None
            })
            .with_detail(format!("{} exponent tuples, |k|,|l| <= {n}", tuples.len())),
    )
}

/// Determinant evidence for one `(s, q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub s: usize,
    pub q: usize,
    /// `(k₀, log10 |det|)` per probed base row.
    pub dets: Vec<(i64, f64)>,
    pub min_log10_abs_det: f64,
    pub min_abs_det: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// `√λ_{kl}γ_{kl}` in 512-bit arithmetic.
fn g_hp(p: &FoliationParams, k: i64, l: i64) -> HpComplex {
    hankel::root_lambda_gamma_hp(p, k, l)
}

/// `det C` with `C_{k,(m,n)} = √λγ_{k+s-m, q-n} - √λγ_{k0}`, rows `k = k₀, …, k₀+sq-1`,
/// columns `(m, n) ∈ [0,s) × [0,q)`. For `q = 0` the `U₁`-only system
/// `Σ_j a_j (g(n+j+1) - g(n))`, `n = k₀..k₀+s-1`, is a Hankel determinant of `h`
/// on rows `k₀+1, …, k₀+s`.
pub fn coefficient_det(p: &FoliationParams, s: usize, q: usize, k0: i64) -> HpComplex {
    if q == 0 {
        if s == 0 {
            return HpComplex::one();
        }
        let rows: Vec<i64> = (0..s as i64).map(|i| k0 + 1 + i).collect();
        return hankel::hankel_det(|i| hankel::h_function_hp(p, i), &rows, s - 1);
    }
    let size = s * q;
    let mut m = Vec::with_capacity(size);
    for row in 0..size as i64 {
        let k = k0 + row;
        let base = g_hp(p, k, 0);
        let mut r = Vec::with_capacity(size);
        for mm in 0..s as i64 {
            for nn in 0..q as i64 {
                r.push(g_hp(p, k + s as i64 - mm, q as i64 - nn) - base.clone());
            }
        }
        m.push(r);
    }
    crate::exact::determinant(&m)
}

/// Minimum `|det C|` over `k₀ ∈ k_range`; an empty range passes vacuously.
pub fn coefficient_probe(
    p: &FoliationParams,
    s: usize,
    q: usize,
    k_range: std::ops::RangeInclusive<i64>,
    threshold: f64,
) -> ProbeReport {
    let ks: Vec<i64> = k_range.collect();
    let dets: Vec<(i64, f64)> = ks
        .par_iter()
        .map(|&k| (k, coefficient_det(p, s, q, k).log10_norm()))
        .collect();
    let min_log = dets.iter().map(|d| d.1).fold(f64::INFINITY, f64::min);
    ProbeReport {
        s,
        q,
        min_abs_det: 10f64.powf(min_log),
        min_log10_abs_det: min_log,
        passed: dets.is_empty() || min_log > threshold.log10(),
        dets,
        threshold,
    }
}

/// Exact phase `e^{iφ}` for a single atom, used by tests and the CLI.
pub fn atom_phase<S: Scalar>(
    atom: PhaseAtom,
    q: BigRational,
    env: &crate::scalar::AtomValues,
) -> S {
    S::phase(&PhaseExponent::atom(atom, q), env)
}

/// Gaussian rational helper re-exported for callers building coefficients.
pub fn coefficient<S: Scalar>(z: &GaussRat) -> S {
    S::from_gauss(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::TimeRegistry;
    use crate::scalar::Exact;

    fn geo() -> Geometry<Exact> {
        let p = FoliationParams::pythagorean(3, 4)
            .unwrap()
            .with_generic(true);
        let reg = TimeRegistry::new(&[("T1", 0.7), ("T2", 1.3)]).unwrap();
        Geometry::new(Kronecker::new(p, reg).unwrap())
    }

    #[test]
    fn repeated_differential_vanishes() {
        let g = geo();
        let red = reduce_word(g.ctx(), &[Letter::Du(1), Letter::Du(2), Letter::Du(1)]).unwrap();
        assert!(red.vanishes);
        assert_eq!(red.sign, -1);
        assert_eq!(red.differentials, vec![1, 1, 2]);
    }

    #[test]
    fn degree_counts_differentials() {
        let g = geo();
        let w = FormWord::new(vec![Factor::Elem(g.ctx().u1()), Factor::D(g.ctx().u2())]);
        assert_eq!(w.degree(), 1);
    }
}
