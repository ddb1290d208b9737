//! Sections over the torus lattice and the operators acting on them.
//!
//! A section is a finitely supported function of `(k, l, comp)` where
//! `comp ∈ 1..=dim` indexes the frame `1, τ, ν, τ⊗ν` (or `e⁺, e⁻` for the
//! rotation algebra). Every operator is a finite sum of blocks
//! `M ⊗ (shift by (Δk, Δl)) ∘ (multiplier m(k, l))`, which is closed under
//! composition and is the shape of every operator in the theory.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, Kronecker};
use crate::error::{Error, Result};
use crate::report::{RelationReport, Status};
use crate::scalar::{AtomValues, NumericScalar, Scalar};

/// Basis vector `e^comp_{kl}`; `comp` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeIndex {
    pub k: i64,
    pub l: i64,
    pub comp: u8,
}

impl ModeIndex {
    pub fn new(k: i64, l: i64, comp: u8) -> Self {
        Self { k, l, comp }
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}_({},{})", self.comp, self.k, self.l)
    }
}

/// Square window `|k|, |l| ≤ n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub n: i64,
}

impl Window {
    pub fn new(n: i64) -> Self {
        Self { n }
    }

    pub fn contains(&self, k: i64, l: i64) -> bool {
        k.abs() <= self.n && l.abs() <= self.n
    }

    /// All modes, `k` outermost and `comp` innermost.
    pub fn modes(&self, dim: usize) -> Vec<ModeIndex> {
        let mut out = Vec::new();
        for k in -self.n..=self.n {
            for l in -self.n..=self.n {
                for c in 1..=dim as u8 {
                    out.push(ModeIndex::new(k, l, c));
                }
            }
        }
        out
    }

    /// Modes whose images under shifts of size `≤ margin` stay inside.
    pub fn interior(&self, dim: usize, margin: i64) -> Vec<ModeIndex> {
        Window::new((self.n - margin).max(-1)).modes(dim)
    }
}

/// Finitely supported section with a leakage accumulator.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionVector<S: Scalar> {
    dim: usize,
    coeffs: BTreeMap<ModeIndex, S>,
    leakage: f64,
}

impl<S: Scalar> SectionVector<S> {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            coeffs: BTreeMap::new(),
            leakage: 0.0,
        }
    }

    pub fn basis(dim: usize, m: ModeIndex) -> Self {
        let mut v = Self::zero(dim);
        v.add_term(m, S::one());
        v
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (ModeIndex, S)>) -> Self {
        let mut v = Self::zero(dim);
        for (m, c) in terms {
            v.add_term(m, c);
        }
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn leakage(&self) -> f64 {
        self.leakage
    }
    pub fn terms(&self) -> impl Iterator<Item = (&ModeIndex, &S)> {
        self.coeffs.iter()
    }
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, m: &ModeIndex) -> S {
        self.coeffs.get(m).cloned().unwrap_or_else(S::zero)
    }

    pub fn add_term(&mut self, m: ModeIndex, c: S) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&m) {
            Some(v) => {
                *v = v.clone() + c;
                if v.is_zero() {
                    self.coeffs.remove(&m);
                }
            }
            None => {
                self.coeffs.insert(m, c);
            }
        }
    }

    fn leak(&mut self, c: &S) {
        self.leakage += c.mass_hint();
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.coeffs {
            out.add_term(*m, c.clone());
        }
        out.leakage += other.leakage;
        out
    }

    pub fn scaled(&self, s: &S) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.coeffs {
            out.add_term(*m, s.clone() * c.clone());
        }
        out.leakage = self.leakage;
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scaled(&-S::one()))
    }

    pub fn norm(&self, env: &AtomValues) -> f64 {
        self.coeffs
            .values()
            .map(|c| c.approx(env).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `⟨self, other⟩`, antilinear in the first slot.
    pub fn inner(&self, other: &Self, env: &AtomValues) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(m, c)| c.approx(env).conj() * other.get(m).approx(env))
            .sum()
    }

    pub fn max_abs(&self, env: &AtomValues) -> f64 {
        self.coeffs
            .values()
            .map(|c| c.approx(env).norm())
            .fold(0.0, f64::max)
    }
}

pub type Matrix<S> = Vec<Vec<S>>;
pub type Multiplier<S> = Arc<dyn Fn(i64, i64) -> S + Send + Sync>;

pub fn mat_zero<S: Scalar>(dim: usize) -> Matrix<S> {
    vec![vec![S::zero(); dim]; dim]
}

pub fn mat_identity<S: Scalar>(dim: usize) -> Matrix<S> {
    let mut m = mat_zero(dim);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = S::one();
    }
    m
}

/// Matrix with the given `(row, col, value)` entries, 0-based.
pub fn mat_entries<S: Scalar>(dim: usize, entries: &[(usize, usize, i64)]) -> Matrix<S> {
    let mut m = mat_zero(dim);
    for &(r, c, v) in entries {
        m[r][c] = S::from_int(v);
    }
    m
}

pub fn mat_mul<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Matrix<S> {
    let n = a.len();
    let mut out = mat_zero(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = S::zero();
            for (t, bt) in b.iter().enumerate() {
                if !a[i][t].is_zero() && !bt[j].is_zero() {
                    acc = acc + a[i][t].clone() * bt[j].clone();
                }
            }
            out[i][j] = acc;
        }
    }
    out
}

fn mat_add<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Matrix<S> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| {
            ra.iter()
                .zip(rb)
                .map(|(x, y)| x.clone() + y.clone())
                .collect()
        })
        .collect()
}

fn mat_is_zero<S: Scalar>(a: &Matrix<S>) -> bool {
    a.iter().all(|r| r.iter().all(|x| x.is_zero()))
}

/// One summand `M ⊗ shift ∘ multiplier`.
#[derive(Clone)]
pub struct Block<S: Scalar> {
    pub matrix: Matrix<S>,
    pub shift: (i64, i64),
    /// `None` means the constant 1.
    pub mult: Option<Multiplier<S>>,
}

impl<S: Scalar> Block<S> {
    pub fn multiplier(&self, k: i64, l: i64) -> S {
        match &self.mult {
            Some(f) => f(k, l),
            None => S::one(),
        }
    }
}

impl<S: Scalar> fmt::Debug for Block<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Block")
            .field("shift", &self.shift)
            .field("has_multiplier", &self.mult.is_some())
            .finish()
    }
}

/// Finite sum of blocks acting on `dim`-component sections.
#[derive(Clone, Debug)]
pub struct BlockOperator<S: Scalar> {
    dim: usize,
    blocks: Vec<Block<S>>,
}

impl<S: Scalar> BlockOperator<S> {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            blocks: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::block(mat_identity(dim), (0, 0), None)
    }

    pub fn block(matrix: Matrix<S>, shift: (i64, i64), mult: Option<Multiplier<S>>) -> Self {
        let dim = matrix.len();
        let mut op = Self::zero(dim);
        op.push(Block {
            matrix,
            shift,
            mult,
        });
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn blocks(&self) -> &[Block<S>] {
        &self.blocks
    }

    /// Largest `max(|Δk|, |Δl|)` over the blocks.
    pub fn reach(&self) -> i64 {
        self.blocks
            .iter()
            .map(|b| b.shift.0.abs().max(b.shift.1.abs()))
            .max()
            .unwrap_or(0)
    }

    fn push(&mut self, b: Block<S>) {
        if mat_is_zero(&b.matrix) {
            return;
        }
        if b.mult.is_none() {
            if let Some(other) = self
                .blocks
                .iter_mut()
                .find(|o| o.mult.is_none() && o.shift == b.shift)
            {
                other.matrix = mat_add(&other.matrix, &b.matrix);
                return;
            }
        }
        self.blocks.push(b);
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for b in &other.blocks {
            out.push(b.clone());
        }
        out
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.dim);
        for b in &self.blocks {
            let matrix = b
                .matrix
                .iter()
                .map(|r| r.iter().map(|x| c.clone() * x.clone()).collect())
                .collect();
            out.push(Block {
                matrix,
                shift: b.shift,
                mult: b.mult.clone(),
            });
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for a in &self.blocks {
            for b in &other.blocks {
                let matrix = mat_mul(&a.matrix, &b.matrix);
                let (dk, dl) = b.shift;
                let mult: Option<Multiplier<S>> = match (&a.mult, &b.mult) {
                    (None, None) => None,
                    (Some(fa), None) => {
                        let fa = fa.clone();
                        Some(Arc::new(move |k, l| fa(k + dk, l + dl)))
                    }
                    (None, Some(fb)) => Some(fb.clone()),
                    (Some(fa), Some(fb)) => {
                        let (fa, fb) = (fa.clone(), fb.clone());
                        Some(Arc::new(move |k, l| fa(k + dk, l + dl) * fb(k, l)))
                    }
                };
                out.push(Block {
                    matrix,
                    shift: (a.shift.0 + dk, a.shift.1 + dl),
                    mult,
                });
            }
        }
        out
    }

    /// `self ∘ other - other ∘ self`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.compose(other).sub(&other.compose(self))
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        self.compose(other).add(&other.compose(self))
    }

    /// Image of a single basis vector, untruncated.
    pub fn apply_mode(&self, m: ModeIndex) -> SectionVector<S> {
        let mut out = SectionVector::zero(self.dim);
        let c = (m.comp - 1) as usize;
        for b in &self.blocks {
            let mut mult = None;
            for (r, row) in b.matrix.iter().enumerate() {
                if row[c].is_zero() {
                    continue;
                }
                let mv = mult.get_or_insert_with(|| b.multiplier(m.k, m.l)).clone();
                out.add_term(
                    ModeIndex::new(m.k + b.shift.0, m.l + b.shift.1, r as u8 + 1),
                    row[c].clone() * mv,
                );
            }
        }
        out
    }

    /// Untruncated image of a finitely supported vector.
    pub fn apply_all(&self, v: &SectionVector<S>) -> SectionVector<S> {
        let mut out = SectionVector::zero(self.dim);
        for (m, c) in v.terms() {
            for (t, x) in self.apply_mode(*m).terms() {
                out.add_term(*t, x.clone() * c.clone());
            }
        }
        out
    }

    /// Applies to `psi`; images outside `window` go to the leakage counter.
    pub fn apply(&self, psi: &SectionVector<S>, window: Window) -> SectionVector<S> {
        let mut out = SectionVector::zero(self.dim);
        out.leakage = psi.leakage;
        for (m, x) in psi.terms() {
            for (t, v) in self.apply_mode(*m).terms() {
                let c = v.clone() * x.clone();
                if window.contains(t.k, t.l) {
                    out.add_term(*t, c);
                } else {
                    out.leak(&c);
                }
            }
        }
        out
    }

    /// Matrix of the `(Δk, Δl)` component at mode `(k, l)`:
    /// entry `[r][c]` is the coefficient of `e^{r+1}_{k+Δk, l+Δl}` in the image of `e^{c+1}_{kl}`.
    pub fn fiber(&self, k: i64, l: i64, shift: (i64, i64)) -> Matrix<S> {
        let mut out = mat_zero::<S>(self.dim);
        for b in self.blocks.iter().filter(|b| b.shift == shift) {
            let m = b.multiplier(k, l);
            for r in 0..self.dim {
                for c in 0..self.dim {
                    if !b.matrix[r][c].is_zero() {
                        out[r][c] = out[r][c].clone() + b.matrix[r][c].clone() * m.clone();
                    }
                }
            }
        }
        out
    }

    /// Dense matrix on the window basis with boundary flags.
    pub fn to_dense(
        &self,
        window: Window,
        env: &AtomValues,
        budget: usize,
    ) -> Result<DenseOperator> {
        let modes = window.modes(self.dim);
        let n = modes.len();
        if n > budget {
            return Err(Error::WindowTooLarge { dim: n, budget });
        }
        let index: BTreeMap<ModeIndex, usize> =
            modes.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let columns: Vec<Vec<(usize, Complex64)>> = modes
            .par_iter()
            .map(|m| {
                self.apply_mode(*m)
                    .terms()
                    .filter_map(|(t, v)| index.get(t).map(|&r| (r, v.approx(env))))
                    .collect()
            })
            .collect();
        let mut matrix = DMatrix::<Complex64>::zeros(n, n);
        for (c, col) in columns.into_iter().enumerate() {
            for (r, v) in col {
                matrix[(r, c)] += v;
            }
        }
        let reach = self.reach();
        let boundary = modes
            .iter()
            .map(|m| !Window::new(window.n - reach).contains(m.k, m.l))
            .collect();
        Ok(DenseOperator {
            matrix,
            modes,
            boundary,
        })
    }
}

/// Dense window matrix together with its mode ordering.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    pub matrix: DMatrix<Complex64>,
    pub modes: Vec<ModeIndex>,
    /// Rows whose column images may leave the window.
    pub boundary: Vec<bool>,
}

impl DenseOperator {
    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.modes.len())
            .filter(|&i| !self.boundary[i])
            .collect()
    }

    /// `max |A_ij - conj(A_ji)|` over interior pairs; `sign = -1` tests anti-Hermitian.
    pub fn hermitian_defect(&self, sign: f64) -> f64 {
        let idx = self.interior_indices();
        let mut worst: f64 = 0.0;
        for &i in &idx {
            for &j in &idx {
                let d = self.matrix[(i, j)] - self.matrix[(j, i)].conj() * sign;
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// Coordinate triplets `row col re im` after a header naming the ordering.
    pub fn triplets(&self) -> String {
        let mut s = String::from("# modes ordered by k, then l, then comp; row col re im\n");
        for (i, m) in self.modes.iter().enumerate() {
            s.push_str(&format!("# {i} {} {} {}\n", m.k, m.l, m.comp));
        }
        for c in 0..self.modes.len() {
            for r in 0..self.modes.len() {
                let v = self.matrix[(r, c)];
                if v.norm() > 0.0 {
                    s.push_str(&format!("{r} {c} {:.17e} {:.17e}\n", v.re, v.im));
                }
            }
        }
        s
    }
}

/// Checks that `op` vanishes on every probe mode.
pub fn check_zero<S: Scalar>(
    id: &str,
    op: &BlockOperator<S>,
    probes: &[ModeIndex],
    env: &AtomValues,
    tol: f64,
) -> RelationReport {
    let results: Vec<(bool, f64, ModeIndex)> = probes
        .par_iter()
        .map(|m| {
            let img = op.apply_mode(*m);
            (img.is_empty(), img.max_abs(env), *m)
        })
        .collect();
    let structural = results.iter().all(|r| r.0);
    let (mut worst, mut witness) = (0.0f64, None);
    for (_, res, m) in &results {
        if *res > worst || (witness.is_none() && *res > tol) {
            worst = *res;
            witness = Some(*m);
        }
    }
    let status = if structural && S::SYMBOLIC_PHASES {
        Status::Exact
    } else if worst <= tol {
        Status::WithinTolerance
    } else {
        Status::Violated
    };
    let witness = if status == Status::Violated {
        witness
    } else {
        None
    };
    RelationReport::new(id, status, worst).with_witness(witness)
}

/// Checks `lhs = rhs` on every probe mode.
pub fn check_equal<S: Scalar>(
    id: &str,
    lhs: &BlockOperator<S>,
    rhs: &BlockOperator<S>,
    probes: &[ModeIndex],
    env: &AtomValues,
    tol: f64,
) -> RelationReport {
    check_zero(id, &lhs.sub(rhs), probes, env, tol)
}

/// The four first-order pieces of the signature operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffOp {
    DL,
    DH,
    DLStar,
    DHStar,
}

impl std::str::FromStr for DiffOp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dL" => Ok(Self::DL),
            "dH" => Ok(Self::DH),
            "dL_star" => Ok(Self::DLStar),
            "dH_star" => Ok(Self::DHStar),
            other => Err(Error::Parse(format!("unknown differential `{other}`"))),
        }
    }
}

/// Operators assembled from the differentials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assembled {
    Qtilde,
    QL,
    QH,
    Qmixed,
}

impl std::str::FromStr for Assembled {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Qtilde" => Ok(Self::Qtilde),
            "QL" => Ok(Self::QL),
            "QH" => Ok(Self::QH),
            "Qmixed" => Ok(Self::Qmixed),
            other => Err(Error::Parse(format!("unknown operator `{other}`"))),
        }
    }
}

/// Operators on `L²(T², E) ≅ ⊕⁴ L²(T²)` built over an arithmetic context.
///
/// On `e_{kl}` the vector fields act as `∂/∂x ↦ i(ak+bl)` and
/// `∂/∂y ↦ i(al-bk)`.
#[derive(Debug, Clone)]
pub struct Geometry<S: Scalar> {
    ctx: Arc<Kronecker<S>>,
    tamper: bool,
}

impl<S: Scalar> Geometry<S> {
    pub const DIM: usize = 4;

    pub fn new(ctx: Kronecker<S>) -> Self {
        Self {
            ctx: Arc::new(ctx),
            tamper: false,
        }
    }

    /// Negative-control hook: flips the sign of one entry of `d_L`.
    pub fn tampered(mut self) -> Self {
        self.tamper = true;
        self
    }

    pub fn ctx(&self) -> &Kronecker<S> {
        &self.ctx
    }
    pub fn env(&self) -> &AtomValues {
        self.ctx.env()
    }

    /// `i(ak+bl)`.
    pub fn dx(&self) -> Multiplier<S> {
        let ctx = self.ctx.clone();
        Arc::new(move |k, l| S::i() * ctx.x_symbol(k, l))
    }

    /// `i(al-bk)`.
    pub fn dy(&self) -> Multiplier<S> {
        let ctx = self.ctx.clone();
        Arc::new(move |k, l| S::i() * ctx.y_symbol(k, l))
    }

    pub fn diff_op(&self, which: DiffOp) -> BlockOperator<S> {
        // frame order 1, τ, ν, τ⊗ν; entries are (row, col, sign)
        let (entries, mult): (Vec<(usize, usize, i64)>, _) = match which {
            DiffOp::DL => {
                let s = if self.tamper { -1 } else { 1 };
                (vec![(1, 0, s), (3, 2, 1)], self.dx())
            }
            DiffOp::DH => (vec![(2, 0, 1), (3, 1, -1)], self.dy()),
            DiffOp::DLStar => (vec![(0, 1, -1), (2, 3, -1)], self.dx()),
            DiffOp::DHStar => (vec![(0, 2, -1), (1, 3, 1)], self.dy()),
        };
        BlockOperator::block(mat_entries(Self::DIM, &entries), (0, 0), Some(mult))
    }

    /// `(-1)^{∂_N}`: +1 on `1, τ`, −1 on `ν, τ⊗ν`.
    pub fn parity(&self) -> BlockOperator<S> {
        BlockOperator::block(
            mat_entries(Self::DIM, &[(0, 0, 1), (1, 1, 1), (2, 2, -1), (3, 3, -1)]),
            (0, 0),
            None,
        )
    }

    pub fn assemble(&self, which: Assembled) -> BlockOperator<S> {
        let dl = self.diff_op(DiffOp::DL);
        let dls = self.diff_op(DiffOp::DLStar);
        let dh = self.diff_op(DiffOp::DH);
        let dhs = self.diff_op(DiffOp::DHStar);
        match which {
            Assembled::Qtilde => dl.add(&dls).add(&dh).add(&dhs),
            Assembled::QL => dl.compose(&dls).sub(&dls.compose(&dl)),
            Assembled::QH => dh.add(&dhs),
            Assembled::Qmixed => self
                .assemble(Assembled::QL)
                .compose(&self.parity())
                .add(&self.assemble(Assembled::QH)),
        }
    }

    /// `π(x)`: `v_t u₁ᵏ u₂ˡ e_{k'l'} = e^{i(a(k+k')+b(l+l'))t} e_{k+k', l+l'}` on every component.
    pub fn represent(&self, x: &AlgebraElement<S>) -> BlockOperator<S> {
        let mut op = BlockOperator::zero(Self::DIM);
        for (m, c) in x.terms() {
            let mult: Option<Multiplier<S>> = if m.t.is_zero() {
                if c.is_one() {
                    None
                } else {
                    let c = c.clone();
                    Some(Arc::new(move |_, _| c.clone()))
                }
            } else {
                let (ctx, c, t, dk, dl) = (self.ctx.clone(), c.clone(), m.t.clone(), m.k, m.l);
                Some(Arc::new(move |k, l| {
                    c.clone() * ctx.mode_phase(&t, k + dk, l + dl)
                }))
            };
            op = op.add(&BlockOperator::block(
                mat_identity(Self::DIM),
                (m.k, m.l),
                mult,
            ));
        }
        op
    }

    pub fn apply_algebra(
        &self,
        x: &AlgebraElement<S>,
        psi: &SectionVector<S>,
        window: Window,
    ) -> SectionVector<S> {
        self.represent(x).apply(psi, window)
    }

    /// `[op, π(x)]`.
    pub fn commutator(&self, op: &BlockOperator<S>, x: &AlgebraElement<S>) -> BlockOperator<S> {
        op.commutator(&self.represent(x))
    }

    /// Closed-form symbol of `Q̃` on the fiber `(k, l)` written with
    /// `∂x = i(ak+bl)`, `∂y = i(al-bk)`; columns are images.
    pub fn qtilde_symbol(&self, k: i64, l: i64) -> Matrix<S> {
        let (x, y) = ((self.dx())(k, l), (self.dy())(k, l));
        let z = S::zero();
        vec![
            vec![z.clone(), -x.clone(), -y.clone(), z.clone()],
            vec![x.clone(), z.clone(), z.clone(), y.clone()],
            vec![y.clone(), z.clone(), z.clone(), -x.clone()],
            vec![z.clone(), -y, x, z],
        ]
    }

    /// Closed-form symbol of `Q = Q_L(-1)^{∂_N} + Q_H`, given in the row
    /// convention (transpose of the column convention used by [`BlockOperator::fiber`]).
    pub fn qmixed_symbol_rows(&self, k: i64, l: i64) -> Matrix<S> {
        let (x, y) = ((self.dx())(k, l), (self.dy())(k, l));
        let x2 = x.clone() * x;
        let z = S::zero();
        vec![
            vec![x2.clone(), z.clone(), y.clone(), z.clone()],
            vec![z.clone(), -x2.clone(), z.clone(), -y.clone()],
            vec![-y.clone(), z.clone(), -x2.clone(), z.clone()],
            vec![z.clone(), y, z, x2],
        ]
    }
}

impl<S: NumericScalar> Geometry<S> {
    /// `X⁴ + c²`, the scalar value of `Q²` on the fiber `(k, l)`.
    pub fn q_squared(&self, k: i64, l: i64) -> f64 {
        let (a, b) = (self.ctx.params().a(), self.ctx.params().b());
        let x = a * k as f64 + b * l as f64;
        let c = a * l as f64 - b * k as f64;
        x.powi(4) + c * c
    }

    fn fiber_power(&self, p: f64) -> Multiplier<S> {
        let g = self.clone();
        Arc::new(move |k, l| {
            let s = g.q_squared(k, l);
            if s == 0.0 {
                S::zero()
            } else {
                S::from_c64(Complex64::new(s.powf(p), 0.0))
            }
        })
    }

    /// `D = Q (Q²)^{-1/4}`, zero on the kernel.
    pub fn dirac(&self) -> BlockOperator<S> {
        let scale = BlockOperator::block(
            mat_identity(Self::DIM),
            (0, 0),
            Some(self.fiber_power(-0.25)),
        );
        self.assemble(Assembled::Qmixed).compose(&scale)
    }

    /// `|D| = (Q²)^{1/4}`.
    pub fn abs_dirac(&self) -> BlockOperator<S> {
        BlockOperator::block(
            mat_identity(Self::DIM),
            (0, 0),
            Some(self.fiber_power(0.25)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{FoliationParams, TimeRegistry};
    use crate::exact::int;
    use crate::scalar::Exact;
    use num_traits::One;

    fn geo() -> Geometry<Exact> {
        let p = FoliationParams::pythagorean(3, 4)
            .unwrap()
            .with_generic(true);
        let reg = TimeRegistry::new(&[("T1", 0.9)]).unwrap();
        Geometry::new(Kronecker::new(p, reg).unwrap())
    }

    fn numeric() -> Geometry<Complex64> {
        let p = FoliationParams::pythagorean(3, 4).unwrap();
        let reg = TimeRegistry::new(&[("T1", 0.9)]).unwrap();
        Geometry::new(Kronecker::new(p, reg).unwrap())
    }

    #[test]
    fn d_l_routes_frame_to_tau() {
        let g = geo();
        let img = g.diff_op(DiffOp::DL).apply_mode(ModeIndex::new(2, -1, 1));
        let want = Exact::i() * g.ctx().x_symbol(2, -1);
        assert_eq!(img.get(&ModeIndex::new(2, -1, 2)), want);
        assert_eq!(img.len(), 1);
        assert!(g
            .diff_op(DiffOp::DL)
            .apply_mode(ModeIndex::new(2, -1, 2))
            .is_empty());
        assert!(g
            .diff_op(DiffOp::DHStar)
            .apply_mode(ModeIndex::new(3, 1, 1))
            .is_empty());
    }

    #[test]
    fn differentials_square_to_zero() {
        let g = geo();
        let probes = Window::new(3).modes(4);
        for d in [DiffOp::DL, DiffOp::DH, DiffOp::DLStar, DiffOp::DHStar] {
            let op = g.diff_op(d);
            let r = check_zero("d²", &op.compose(&op), &probes, g.env(), 0.0);
            assert_eq!(r.status, Status::Exact, "{d:?}");
        }
    }

    #[test]
    fn leakage_collects_shifted_mass() {
        let g = geo();
        let psi = SectionVector::basis(4, ModeIndex::new(2, 0, 1));
        let out = g.apply_algebra(&g.ctx().u1(), &psi, Window::new(2));
        assert!(out.is_empty());
        assert!((out.leakage() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn v_t_on_mode_gets_phase() {
        let g = geo();
        let v = g.ctx().v_symbol("T1", int(1)).unwrap();
        let img = g.represent(&v).apply_mode(ModeIndex::new(1, 0, 2));
        let want = g
            .ctx()
            .mode_phase(&crate::algebra::Time::symbol(1, 0, int(1)), 1, 0);
        assert_eq!(img.get(&ModeIndex::new(1, 0, 2)), want);
        let img0 = g.represent(&v).apply_mode(ModeIndex::new(0, 0, 3));
        assert_eq!(img0.get(&ModeIndex::new(0, 0, 3)), Exact::one());
    }

    #[test]
    fn dense_symmetries_on_interior() {
        let g = numeric();
        let dl = g.diff_op(DiffOp::DL).add(&g.diff_op(DiffOp::DLStar).neg());
        // d_L - d_L^* is anti-Hermitian whenever d_L^* is the adjoint of d_L
        let dense = dl.to_dense(Window::new(3), g.env(), 10_000).unwrap();
        assert!(dense.hermitian_defect(-1.0) < 1e-12);
        let q = g
            .assemble(Assembled::Qtilde)
            .to_dense(Window::new(3), g.env(), 10_000)
            .unwrap();
        assert!(q.hermitian_defect(1.0) < 1e-12);
        let id = BlockOperator::<Complex64>::identity(4)
            .to_dense(Window::new(1), g.env(), 100)
            .unwrap();
        assert_eq!(id.matrix, DMatrix::identity(36, 36));
        let too_big =
            BlockOperator::<Complex64>::identity(4).to_dense(Window::new(10), g.env(), 100);
        assert!(matches!(
            too_big,
            Err(Error::WindowTooLarge {
                dim: 1764,
                budget: 100
            })
        ));
    }
}
