//! Dense primal-dual interior point solver for block semidefinite programs.
//!
//! Problems are stated in primal standard form
//!
//! ```text
//! minimize   <C, X>            (or maximize)
//! subject to <A_i, X> = b_i    i = 1..m
//!            X = diag(X_1, ..., X_p) PSD
//! ```
//!
//! with dual `max b^T y  s.t.  Z = C - sum y_i A_i  PSD`. The iteration runs on
//! the homogeneous self-dual embedding with Nesterov-Todd scaling and a Mehrotra
//! predictor-corrector step, so infeasibility is detected through the `tau`/`kappa`
//! pair instead of by divergence.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// A linear functional `X -> sum <A_b, X_b>` stored by upper-triangle entries of the
/// symmetric coefficient matrices `A_b`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Functional {
    entries: BTreeMap<(usize, usize, usize), f64>,
}

impl Functional {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `coeff * X_block[i, j]` to the functional.
    pub fn add_term(&mut self, block: usize, i: usize, j: usize, coeff: f64) {
        if i == j {
            self.add_matrix_entry(block, i, j, coeff);
        } else {
            self.add_matrix_entry(block, i, j, coeff / 2.0);
        }
    }

    /// Adds `v` to the symmetric coefficient entries `(i, j)` and `(j, i)`.
    pub fn add_matrix_entry(&mut self, block: usize, i: usize, j: usize, v: f64) {
        if v == 0.0 {
            return;
        }
        let key = (block, i.min(j), i.max(j));
        let e = self.entries.entry(key).or_insert(0.0);
        *e += v;
        if *e == 0.0 {
            self.entries.remove(&key);
        }
    }

    /// Adds `scale * M` for a dense symmetric matrix placed on `block`.
    pub fn add_matrix(&mut self, block: usize, m: &DMatrix<f64>, scale: f64) {
        for i in 0..m.nrows() {
            for j in i..m.ncols() {
                self.add_matrix_entry(block, i, j, scale * m[(i, j)]);
            }
        }
    }

    /// Upper-triangle entries `(block, i, j, value)` with `i <= j`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        self.entries.iter().map(|(&(b, i, j), &v)| (b, i, j, v))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn evaluate(&self, x: &[DMatrix<f64>]) -> f64 {
        self.entries()
            .map(|(b, i, j, v)| {
                if i == j {
                    v * x[b][(i, i)]
                } else {
                    v * (x[b][(i, j)] + x[b][(j, i)])
                }
            })
            .sum()
    }

    fn scale_by(&self, s: f64) -> Functional {
        Functional {
            entries: self.entries.iter().map(|(&k, &v)| (k, v * s)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub lhs: Functional,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SdpError {
    #[error("block index {block} out of range ({nblocks} blocks)")]
    BadBlock { block: usize, nblocks: usize },
    #[error("entry ({i}, {j}) outside block {block} of size {size}")]
    BadEntry {
        block: usize,
        i: usize,
        j: usize,
        size: usize,
    },
    #[error("non-finite data in the problem")]
    NonFinite,
}

/// Block-structured SDP in primal standard form.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    pub blocks: Vec<usize>,
    pub constraints: Vec<Constraint>,
    pub objective: Functional,
    pub sense: Sense,
}

impl SdpProblem {
    pub fn new(blocks: Vec<usize>, sense: Sense) -> Self {
        SdpProblem {
            blocks,
            constraints: Vec::new(),
            objective: Functional::new(),
            sense,
        }
    }

    pub fn add_block(&mut self, size: usize) -> usize {
        self.blocks.push(size);
        self.blocks.len() - 1
    }

    pub fn add_constraint(&mut self, lhs: Functional, rhs: f64) -> usize {
        self.constraints.push(Constraint { lhs, rhs });
        self.constraints.len() - 1
    }

    /// Constrains a whole block to equal the given symmetric matrix.
    pub fn fix_block(&mut self, block: usize, value: &DMatrix<f64>) {
        for i in 0..value.nrows() {
            for j in i..value.ncols() {
                let mut f = Functional::new();
                f.add_term(block, i, j, 1.0);
                self.add_constraint(f, value[(i, j)]);
            }
        }
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn validate(&self) -> Result<(), SdpError> {
        let all = self
            .constraints
            .iter()
            .map(|c| &c.lhs)
            .chain(std::iter::once(&self.objective));
        for f in all {
            for (block, i, j, v) in f.entries() {
                let size = *self.blocks.get(block).ok_or(SdpError::BadBlock {
                    block,
                    nblocks: self.blocks.len(),
                })?;
                if j >= size {
                    return Err(SdpError::BadEntry { block, i, j, size });
                }
                if !v.is_finite() {
                    return Err(SdpError::NonFinite);
                }
            }
        }
        if self.constraints.iter().any(|c| !c.rhs.is_finite()) {
            return Err(SdpError::NonFinite);
        }
        Ok(())
    }

    /// `sum_i y_i A_i` as dense blocks.
    pub fn adjoint(&self, y: &[f64]) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = self.blocks.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        for (c, &yi) in self.constraints.iter().zip(y) {
            if yi == 0.0 {
                continue;
            }
            accumulate(&mut out, &c.lhs, yi);
        }
        out
    }

    pub fn objective_matrix(&self) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = self.blocks.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        accumulate(&mut out, &self.objective, 1.0);
        out
    }

    /// Largest violation of `<A_i, X> = b_i`.
    pub fn primal_residual(&self, x: &[DMatrix<f64>]) -> f64 {
        self.constraints
            .iter()
            .map(|c| (c.lhs.evaluate(x) - c.rhs).abs())
            .fold(0.0, f64::max)
    }
}

fn accumulate(out: &mut [DMatrix<f64>], f: &Functional, s: f64) {
    for (b, i, j, v) in f.entries() {
        out[b][(i, j)] += s * v;
        if i != j {
            out[b][(j, i)] += s * v;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    /// `y` holds a ray with `b^T y = 1` and `-sum y_i A_i` PSD (stored in `z`).
    PrimalInfeasible,
    /// `x` holds a ray with `A(X) = 0`, `X` PSD and objective `-1` in minimization form.
    DualInfeasible,
    Inaccurate,
    IterationLimit,
}

impl SdpStatus {
    pub fn label(&self) -> &'static str {
        match self {
            SdpStatus::Optimal => "optimal",
            SdpStatus::PrimalInfeasible => "primal-infeasible",
            SdpStatus::DualInfeasible => "dual-infeasible",
            SdpStatus::Inaccurate => "inaccurate",
            SdpStatus::IterationLimit => "iteration-limit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub x: Vec<DMatrix<f64>>,
    pub y: Vec<f64>,
    pub z: Vec<DMatrix<f64>>,
    /// Objective of `X` in the problem's own sense.
    pub primal_objective: f64,
    /// `b^T y` in the problem's own sense.
    pub dual_objective: f64,
    pub residuals: Residuals,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub tol: f64,
    pub max_iters: usize,
    pub infeas_ratio: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            tol: 1e-8,
            max_iters: 200,
            infeas_ratio: 1e6,
        }
    }
}

const REGULARIZATION: f64 = 1e-13;
const STEP_FRACTION: f64 = 0.99;
const REFINE_STEPS: usize = 2;
/// Coefficients (and row norms) below this fraction of the largest one are
/// treated as round-off by the presolve steps.
const NEGLIGIBLE: f64 = 1e-12;

/// Solves `p` with the homogeneous self-dual interior point method.
pub fn solve(p: &SdpProblem, settings: &Settings) -> Result<SdpSolution, SdpError> {
    p.validate()?;
    if let Some(face) = Face::find(p) {
        let sol = solve(&face.restrict(p), settings)?;
        return Ok(face.lift(p, sol));
    }
    let sign = match p.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let c: Vec<DMatrix<f64>> = p.objective_matrix().into_iter().map(|m| m * sign).collect();
    let presolved = presolve(p);
    let mut sol = match presolved {
        Presolve::Inconsistent(ray) => infeasible_from_presolve(p, ray),
        Presolve::Rows(rows) => {
            let reduced = Reduced::new(p, &rows, &c);
            let mut s = reduced.run(settings);
            let mut y = vec![0.0; p.constraints.len()];
            for (k, &r) in rows.iter().enumerate() {
                y[r] = s.y[k] * reduced.row_scale[k];
            }
            s.y = y;
            s
        }
    };
    if sign < 0.0 {
        sol.primal_objective = -sol.primal_objective;
        sol.dual_objective = -sol.dual_objective;
        for v in sol.y.iter_mut() {
            *v = -*v;
        }
    }
    Ok(sol)
}

/// Rows and columns forced to zero: a constraint `sum_k c_k X[i_k, i_k] = 0` whose
/// surviving terms are diagonal with coefficients of one sign zeroes every `X[i_k, i_k]`,
/// hence the whole row and column. Repeated to a fixpoint.
struct Face {
    /// Per block, the surviving indices.
    kept: Vec<Vec<usize>>,
    /// Old block index to new block index, `None` for vanished blocks.
    block_map: Vec<Option<usize>>,
}

impl Face {
    fn find(p: &SdpProblem) -> Option<Face> {
        let mut alive: Vec<Vec<bool>> = p.blocks.iter().map(|&n| vec![true; n]).collect();
        let scale = p
            .constraints
            .iter()
            .flat_map(|c| c.lhs.entries())
            .fold(0.0f64, |m, e| m.max(e.3.abs()));
        let tiny = NEGLIGIBLE * scale;
        let mut any = false;
        loop {
            let mut changed = false;
            for c in p.constraints.iter().filter(|c| c.rhs == 0.0) {
                let mut diag: BTreeMap<(usize, usize), f64> = BTreeMap::new();
                let mut mixed = false;
                for (b, i, j, v) in c.lhs.entries() {
                    if !alive[b][i] || !alive[b][j] || v.abs() <= tiny {
                        continue;
                    }
                    if i != j {
                        mixed = true;
                        break;
                    }
                    *diag.entry((b, i)).or_insert(0.0) += v;
                }
                if mixed || diag.is_empty() {
                    continue;
                }
                let pos = diag.values().all(|&v| v >= 0.0);
                let neg = diag.values().all(|&v| v <= 0.0);
                if !(pos || neg) {
                    continue;
                }
                for (&(b, i), &v) in &diag {
                    if v.abs() > tiny {
                        alive[b][i] = false;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
            any = true;
        }
        if !any {
            return None;
        }
        let kept: Vec<Vec<usize>> = alive
            .iter()
            .map(|a| (0..a.len()).filter(|&i| a[i]).collect())
            .collect();
        let mut next = 0;
        let block_map = kept
            .iter()
            .map(|k| {
                (!k.is_empty()).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        Some(Face { kept, block_map })
    }

    fn map_functional(&self, f: &Functional) -> Functional {
        let mut out = Functional::new();
        for (b, i, j, v) in f.entries() {
            let Some(nb) = self.block_map[b] else { continue };
            let k = &self.kept[b];
            if let (Ok(ni), Ok(nj)) = (k.binary_search(&i), k.binary_search(&j)) {
                out.add_matrix_entry(nb, ni, nj, v);
            }
        }
        out
    }

    /// The problem on the face; constraint indices are unchanged.
    fn restrict(&self, p: &SdpProblem) -> SdpProblem {
        let blocks = self.kept.iter().map(Vec::len).filter(|&n| n > 0).collect();
        let mut q = SdpProblem::new(blocks, p.sense);
        q.objective = self.map_functional(&p.objective);
        for c in &p.constraints {
            q.add_constraint(self.map_functional(&c.lhs), c.rhs);
        }
        q
    }

    fn lift(&self, p: &SdpProblem, sol: SdpSolution) -> SdpSolution {
        let x = p
            .blocks
            .iter()
            .enumerate()
            .map(|(b, &n)| {
                let mut m = DMatrix::zeros(n, n);
                if let Some(nb) = self.block_map[b] {
                    let k = &self.kept[b];
                    for (a, &i) in k.iter().enumerate() {
                        for (c, &j) in k.iter().enumerate() {
                            m[(i, j)] = sol.x[nb][(a, c)];
                        }
                    }
                }
                m
            })
            .collect();
        let ay = p.adjoint(&sol.y);
        let z = match sol.status {
            SdpStatus::PrimalInfeasible => ay.into_iter().map(|m| -m).collect(),
            _ => {
                let sign = if p.sense == Sense::Minimize { 1.0 } else { -1.0 };
                p.objective_matrix()
                    .into_iter()
                    .zip(ay)
                    .map(|(c, a)| (c - a) * sign)
                    .collect()
            }
        };
        SdpSolution { x, z, ..sol }
    }
}

enum Presolve {
    Rows(Vec<usize>),
    Inconsistent(Vec<f64>),
}

/// Finds a maximal linearly independent subset of the constraint functionals by
/// pivoted Cholesky on their Gram matrix, rejecting inconsistent dependent rows.
fn presolve(p: &SdpProblem) -> Presolve {
    let m = p.constraints.len();
    let mut coords: BTreeMap<(usize, usize, usize), Vec<(usize, f64)>> = BTreeMap::new();
    for (r, c) in p.constraints.iter().enumerate() {
        for (b, i, j, v) in c.lhs.entries() {
            coords.entry((b, i, j)).or_default().push((r, v));
        }
    }
    let mut k = DMatrix::<f64>::zeros(m, m);
    for (&(_, i, j), list) in &coords {
        let w = if i == j { 1.0 } else { 2.0 };
        for &(r1, v1) in list {
            for &(r2, v2) in list {
                k[(r1, r2)] += w * v1 * v2;
            }
        }
    }
    let diag: Vec<f64> = (0..m).map(|i| k[(i, i)]).collect();
    let floor = NEGLIGIBLE * NEGLIGIBLE * diag.iter().copied().fold(0.0, f64::max);
    // Pivoted Cholesky: l is column-major in pivot order.
    let mut work = k.clone();
    let mut kept: Vec<usize> = Vec::new();
    let mut remaining: Vec<usize> = (0..m).collect();
    loop {
        let best = remaining
            .iter()
            .enumerate()
            .filter(|(_, &r)| work[(r, r)] > 1e-12 * diag[r].max(1e-300) && diag[r] > floor)
            .max_by(|a, b| {
                (work[(*a.1, *a.1)] / diag[*a.1]).total_cmp(&(work[(*b.1, *b.1)] / diag[*b.1]))
            })
            .map(|(pos, &r)| (pos, r));
        let Some((pos, piv)) = best else { break };
        if work[(piv, piv)] <= 1e-10 * diag[piv] {
            break;
        }
        remaining.remove(pos);
        let d = work[(piv, piv)];
        for &i in &remaining {
            let f = work[(i, piv)] / d;
            if f == 0.0 {
                continue;
            }
            for &j in &remaining {
                work[(i, j)] -= f * work[(piv, j)];
            }
        }
        kept.push(piv);
    }
    if remaining.is_empty() {
        return Presolve::Rows(kept);
    }
    let kk = DMatrix::from_fn(kept.len(), kept.len(), |a, b| k[(kept[a], kept[b])]);
    let chol = (!kept.is_empty()).then(|| nalgebra::Cholesky::new(kk)).flatten();
    let bkept: Vec<f64> = kept.iter().map(|&r| p.constraints[r].rhs).collect();
    let bscale = 1.0 + p.constraints.iter().map(|c| c.rhs.abs()).fold(0.0, f64::max);
    for &r in &remaining {
        let lambda = match &chol {
            Some(ch) => ch.solve(&DVector::from_iterator(
                kept.len(),
                kept.iter().map(|&q| k[(q, r)]),
            )),
            None => DVector::zeros(0),
        };
        let implied: f64 = lambda.iter().zip(&bkept).map(|(l, b)| l * b).sum();
        let gap = p.constraints[r].rhs - implied;
        let lscale = 1.0 + lambda.iter().map(|v| v.abs()).sum::<f64>();
        if gap.abs() > 1e-9 * bscale * lscale {
            let mut ray = vec![0.0; m];
            ray[r] = 1.0 / gap;
            for (q, l) in kept.iter().zip(lambda.iter()) {
                ray[*q] = -l / gap;
            }
            return Presolve::Inconsistent(ray);
        }
    }
    kept.sort_unstable();
    Presolve::Rows(kept)
}

fn infeasible_from_presolve(p: &SdpProblem, ray: Vec<f64>) -> SdpSolution {
    let z: Vec<DMatrix<f64>> = p.adjoint(&ray).into_iter().map(|m| -m).collect();
    let res = z.iter().map(linalg::max_abs).fold(0.0, f64::max);
    SdpSolution {
        status: SdpStatus::PrimalInfeasible,
        x: p.blocks.iter().map(|&n| DMatrix::zeros(n, n)).collect(),
        y: ray,
        z,
        primal_objective: f64::INFINITY,
        dual_objective: f64::INFINITY,
        residuals: Residuals {
            primal: 0.0,
            dual: res,
            gap: 0.0,
        },
        iterations: 0,
    }
}

/// Problem restricted to independent rows, minimization form.
/// A constraint row's `(i, j, value)` entries inside one block.
type RowEntries = (usize, Vec<(usize, usize, f64)>);

struct Reduced<'a> {
    blocks: &'a [usize],
    rows: Vec<Functional>,
    b: DVector<f64>,
    c: &'a [DMatrix<f64>],
    /// Per block, per row: the entries of that row living in the block.
    by_block: Vec<Vec<RowEntries>>,
    bnorm: f64,
    cnorm: f64,
    row_scale: Vec<f64>,
}

struct Direction {
    dx: Vec<DMatrix<f64>>,
    dz: Vec<DMatrix<f64>>,
    dy: DVector<f64>,
    dtau: f64,
    dkappa: f64,
}

struct Scaling {
    r: DMatrix<f64>,
    rti: DMatrix<f64>,
    g: DMatrix<f64>,
    lambda: DVector<f64>,
}

impl<'a> Reduced<'a> {
    fn new(p: &'a SdpProblem, rows: &[usize], c: &'a [DMatrix<f64>]) -> Self {
        // Row scaling by the functional norm improves the Schur system.
        let mut funcs = Vec::with_capacity(rows.len());
        let mut row_scale = Vec::with_capacity(rows.len());
        let mut b = DVector::zeros(rows.len());
        for (k, &r) in rows.iter().enumerate() {
            let f = &p.constraints[r].lhs;
            let norm = f
                .entries()
                .map(|(_, i, j, v)| if i == j { v * v } else { 2.0 * v * v })
                .sum::<f64>()
                .sqrt();
            let s = if norm > 0.0 { 1.0 / norm } else { 1.0 };
            funcs.push(f.scale_by(s));
            row_scale.push(s);
            b[k] = p.constraints[r].rhs * s;
        }
        let mut by_block: Vec<Vec<RowEntries>> = vec![Vec::new(); p.blocks.len()];
        for (k, f) in funcs.iter().enumerate() {
            let mut per: BTreeMap<usize, Vec<(usize, usize, f64)>> = BTreeMap::new();
            for (blk, i, j, v) in f.entries() {
                per.entry(blk).or_default().push((i, j, v));
            }
            for (blk, list) in per {
                by_block[blk].push((k, list));
            }
        }
        let bnorm = b.amax();
        let cnorm = c.iter().map(linalg::max_abs).fold(0.0, f64::max);
        Reduced {
            blocks: &p.blocks,
            rows: funcs,
            b,
            c,
            by_block,
            bnorm,
            cnorm,
            row_scale,
        }
    }

    fn m(&self) -> usize {
        self.rows.len()
    }

    fn op(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(self.m(), self.rows.iter().map(|f| f.evaluate(x)))
    }

    fn adj(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = self.blocks.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        for (f, &yi) in self.rows.iter().zip(y.iter()) {
            if yi != 0.0 {
                accumulate(&mut out, f, yi);
            }
        }
        out
    }

    fn nu(&self) -> f64 {
        self.blocks.iter().sum::<usize>() as f64
    }

    /// Schur matrix `M_ij = sum_blocks <A_i, G A_j G>`.
    fn schur(&self, scal: &[Scaling]) -> DMatrix<f64> {
        let m = self.m();
        let mut mm = DMatrix::zeros(m, m);
        for (blk, rows) in self.by_block.iter().enumerate() {
            let n = self.blocks[blk];
            let g = &scal[blk].g;
            for (pos, (j, list)) in rows.iter().enumerate() {
                let mut t = DMatrix::<f64>::zeros(n, n);
                for &(p, q, v) in list {
                    if p == q {
                        t.ger(v, &g.column(p), &g.column(p), 1.0);
                    } else {
                        t.ger(v, &g.column(p), &g.column(q), 1.0);
                        t.ger(v, &g.column(q), &g.column(p), 1.0);
                    }
                }
                for (i, ilist) in rows[..=pos].iter() {
                    let val: f64 = ilist
                        .iter()
                        .map(|&(p, q, v)| if p == q { v * t[(p, p)] } else { v * (t[(p, q)] + t[(q, p)]) })
                        .sum();
                    mm[(*i, *j)] += val;
                    if i != j {
                        mm[(*j, *i)] += val;
                    }
                }
            }
        }
        mm
    }

    fn run(&self, settings: &Settings) -> SdpSolution {
        let nblk = self.blocks.len();
        let mut x: Vec<DMatrix<f64>> = self.blocks.iter().map(|&n| DMatrix::identity(n, n)).collect();
        let mut z = x.clone();
        let mut y = DVector::zeros(self.m());
        let mut tau = 1.0;
        let mut kappa = 1.0;
        let nu = self.nu();
        let mut stalls = 0;
        let mut last = None;
        let mut best: Option<(f64, SdpSolution)> = None;

        for iter in 0..=settings.max_iters {
            let ax = self.op(&x);
            let aty = self.adj(&y);
            let rp: DVector<f64> = &self.b * tau - &ax;
            let rd: Vec<DMatrix<f64>> = (0..nblk).map(|k| &self.c[k] * tau - &aty[k] - &z[k]).collect();
            let cx: f64 = (0..nblk).map(|k| self.c[k].dot(&x[k])).sum();
            let by = self.b.dot(&y);
            let rg = kappa + cx - by;
            let xz: f64 = (0..nblk).map(|k| x[k].dot(&z[k])).sum();
            let mu = (xz + tau * kappa) / (nu + 1.0);

            let pres = rp.amax() / tau / (1.0 + self.bnorm);
            let dres = rd.iter().map(linalg::max_abs).fold(0.0, f64::max) / tau / (1.0 + self.cnorm);
            let pobj = cx / tau;
            let dobj = by / tau;
            let gap = (pobj - dobj).abs() / (1.0 + pobj.abs().min(dobj.abs()));
            let compl = xz / (tau * tau);
            let rel_compl = compl / (1.0 + pobj.abs().min(dobj.abs()));
            log::trace!(
                "iter {iter}: pobj {pobj:.6e} dobj {dobj:.6e} pres {pres:.1e} dres {dres:.1e} gap {gap:.1e} tau {tau:.1e} kappa {kappa:.1e}"
            );
            let residuals = Residuals {
                primal: pres,
                dual: dres,
                gap,
            };
            let snapshot = |status: SdpStatus| SdpSolution {
                status,
                x: x.iter().map(|m| m / tau).collect(),
                y: y.iter().map(|v| v / tau).collect(),
                z: z.iter().map(|m| m / tau).collect(),
                primal_objective: pobj,
                dual_objective: dobj,
                residuals,
                iterations: iter,
            };
            if pres <= settings.tol && dres <= settings.tol && gap <= settings.tol && rel_compl <= settings.tol * 10.0 {
                return snapshot(SdpStatus::Optimal);
            }
            // Infeasibility rays.
            if by > 0.0 && kappa / tau > settings.infeas_ratio {
                let yr = &y / by;
                let zr: Vec<DMatrix<f64>> = z.iter().map(|m| m / by).collect();
                let ares = self.adj(&yr);
                let res = (0..nblk)
                    .map(|k| linalg::max_abs(&(&ares[k] + &zr[k])))
                    .fold(0.0, f64::max);
                if res <= settings.tol {
                    return SdpSolution {
                        status: SdpStatus::PrimalInfeasible,
                        x: x.iter().map(|m| m / tau).collect(),
                        y: yr.iter().copied().collect(),
                        z: zr,
                        primal_objective: f64::INFINITY,
                        dual_objective: f64::INFINITY,
                        residuals: Residuals {
                            primal: pres,
                            dual: res,
                            gap,
                        },
                        iterations: iter,
                    };
                }
            }
            if cx < 0.0 && kappa / tau > settings.infeas_ratio {
                let xr: Vec<DMatrix<f64>> = x.iter().map(|m| m / -cx).collect();
                let res = self.op(&xr).amax();
                if res <= settings.tol {
                    return SdpSolution {
                        status: SdpStatus::DualInfeasible,
                        x: xr,
                        y: y.iter().map(|v| v / tau).collect(),
                        z: z.iter().map(|m| m / tau).collect(),
                        primal_objective: f64::NEG_INFINITY,
                        dual_objective: f64::NEG_INFINITY,
                        residuals: Residuals {
                            primal: res,
                            dual: dres,
                            gap,
                        },
                        iterations: iter,
                    };
                }
            }
            let merit = pres.max(dres).max(gap);
            if best.as_ref().is_none_or(|(b, _)| merit < *b) {
                best = Some((merit, snapshot(SdpStatus::Inaccurate)));
            }
            if iter == settings.max_iters || stalls >= 5 {
                let status = if stalls >= 5 {
                    SdpStatus::Inaccurate
                } else {
                    SdpStatus::IterationLimit
                };
                let mut out = best.map(|(_, s)| s).unwrap_or_else(|| snapshot(status));
                out.status = status;
                out.iterations = iter;
                return out;
            }

            let Some(scal) = (0..nblk)
                .map(|k| nt_scaling(&x[k], &z[k]))
                .collect::<Option<Vec<_>>>()
            else {
                stalls = 5;
                continue;
            };
            let mm = self.schur(&scal);
            let Some(solver) = KktSolver::new(mm) else {
                stalls = 5;
                continue;
            };
            let gcg: Vec<DMatrix<f64>> = (0..nblk).map(|k| &scal[k].g * &self.c[k] * &scal[k].g).collect();
            let g = self.op(&gcg);
            let q = solver.solve(&(&g + &self.b));
            let c_gcg: f64 = (0..nblk).map(|k| self.c[k].dot(&gcg[k])).sum();

            // Solves the linearized system for general right-hand sides:
            //   A(dX) - b dtau = r1,  -A*(dy) - dZ + C dtau = r2,
            //   dkappa + <C,dX> - b^T dy = r3,  Lambda o (dX~ + dZ~) = r4,
            //   kappa dtau + tau dkappa = r5.
            let raw_solve = |r1: &DVector<f64>, r2: &[DMatrix<f64>], r3: f64, r4: &[DMatrix<f64>], r5: f64| -> Direction {
                let rtr: Vec<DMatrix<f64>> = (0..nblk)
                    .map(|k| {
                        let l = &scal[k].lambda;
                        let t = DMatrix::from_fn(l.len(), l.len(), |i, j| 2.0 * r4[k][(i, j)] / (l[i] + l[j]));
                        &scal[k].r * t * scal[k].r.transpose()
                    })
                    .collect();
                let gr2g: Vec<DMatrix<f64>> = (0..nblk).map(|k| &scal[k].g * &r2[k] * &scal[k].g).collect();
                let rhs1 = r1 - self.op(&rtr) - self.op(&gr2g);
                let pv = solver.solve(&rhs1);
                let c_rtr: f64 = (0..nblk).map(|k| self.c[k].dot(&rtr[k])).sum();
                let gcg_r2: f64 = (0..nblk).map(|k| gcg[k].dot(&r2[k])).sum();
                let num = r3 - r5 / tau - c_rtr - g.dot(&pv) - gcg_r2 + self.b.dot(&pv);
                let den = -kappa / tau - c_gcg + g.dot(&q) - self.b.dot(&q);
                let dtau = num / den;
                let dy = &pv + &q * dtau;
                let ady = self.adj(&dy);
                let dz: Vec<DMatrix<f64>> = (0..nblk).map(|k| &self.c[k] * dtau - &ady[k] - &r2[k]).collect();
                let dx: Vec<DMatrix<f64>> = (0..nblk)
                    .map(|k| {
                        let mut d = &rtr[k] - &scal[k].g * &dz[k] * &scal[k].g;
                        symmetrize_in_place(&mut d);
                        d
                    })
                    .collect();
                let dkappa = (r5 - kappa * dtau) / tau;
                Direction {
                    dx,
                    dz,
                    dy,
                    dtau,
                    dkappa,
                }
            };
            let solve_dir = |rhs: &[DMatrix<f64>], rhs_tk: f64, eta: f64| -> Direction {
                let r1 = &rp * eta;
                let r2: Vec<DMatrix<f64>> = rd.iter().map(|m| m * -eta).collect();
                let r3 = -eta * rg;
                let mut d = raw_solve(&r1, &r2, r3, rhs, rhs_tk);
                for _ in 0..REFINE_STEPS {
                    let e1 = &r1 - (self.op(&d.dx) - &self.b * d.dtau);
                    let ady = self.adj(&d.dy);
                    let e2: Vec<DMatrix<f64>> = (0..nblk)
                        .map(|k| &r2[k] - (-&ady[k] - &d.dz[k] + &self.c[k] * d.dtau))
                        .collect();
                    let cdx: f64 = (0..nblk).map(|k| self.c[k].dot(&d.dx[k])).sum();
                    let e3 = r3 - (d.dkappa + cdx - self.b.dot(&d.dy));
                    let e4: Vec<DMatrix<f64>> = (0..nblk)
                        .map(|k| {
                            let s = &scal[k];
                            let t = s.rti.transpose() * &d.dx[k] * &s.rti + s.r.transpose() * &d.dz[k] * &s.r;
                            let n = s.lambda.len();
                            DMatrix::from_fn(n, n, |i, j| {
                                rhs[k][(i, j)] - 0.5 * (s.lambda[i] + s.lambda[j]) * t[(i, j)]
                            })
                        })
                        .collect();
                    let e5 = rhs_tk - (kappa * d.dtau + tau * d.dkappa);
                    let c = raw_solve(&e1, &e2, e3, &e4, e5);
                    for k in 0..nblk {
                        d.dx[k] += &c.dx[k];
                        d.dz[k] += &c.dz[k];
                    }
                    d.dy += &c.dy;
                    d.dtau += c.dtau;
                    d.dkappa += c.dkappa;
                }
                d
            };

            // Predictor.
            let rhs_aff: Vec<DMatrix<f64>> = scal
                .iter()
                .map(|s| DMatrix::from_diagonal(&s.lambda.map(|l| -l * l)))
                .collect();
            let aff = solve_dir(&rhs_aff, -tau * kappa, 1.0);
            let alpha_aff = step_length(&scal, &aff, tau, kappa).min(1.0);
            let xz_aff: f64 = (0..nblk)
                .map(|k| (&x[k] + &aff.dx[k] * alpha_aff).dot(&(&z[k] + &aff.dz[k] * alpha_aff)))
                .sum();
            let mu_aff = (xz_aff + (tau + alpha_aff * aff.dtau) * (kappa + alpha_aff * aff.dkappa)) / (nu + 1.0);
            let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

            // Corrector.
            let rhs: Vec<DMatrix<f64>> = (0..nblk)
                .map(|k| {
                    let s = &scal[k];
                    let dxs = s.rti.transpose() * &aff.dx[k] * &s.rti;
                    let dzs = s.r.transpose() * &aff.dz[k] * &s.r;
                    let prod = (&dxs * &dzs + &dzs * &dxs) * 0.5;
                    let n = s.lambda.len();
                    DMatrix::from_fn(n, n, |i, j| {
                        let base = if i == j { sigma * mu - s.lambda[i] * s.lambda[i] } else { 0.0 };
                        base - prod[(i, j)]
                    })
                })
                .collect();
            let rhs_tk = sigma * mu - tau * kappa - aff.dtau * aff.dkappa;
            let dir = solve_dir(&rhs, rhs_tk, 1.0 - sigma);
            let alpha = (STEP_FRACTION * step_length(&scal, &dir, tau, kappa)).min(1.0);
            if alpha < 1e-10 {
                stalls += 1;
            }
            for k in 0..nblk {
                x[k] += &dir.dx[k] * alpha;
                z[k] += &dir.dz[k] * alpha;
                symmetrize_in_place(&mut x[k]);
                symmetrize_in_place(&mut z[k]);
            }
            y += &dir.dy * alpha;
            tau += alpha * dir.dtau;
            kappa += alpha * dir.dkappa;
            let progress = (mu, pres.max(dres));
            if let Some((lmu, lres)) = last {
                let stuck = mu > 0.99 * lmu && pres.max(dres) > 0.99 * lres;
                stalls = if stuck { stalls + 1 } else { 0 };
            }
            last = Some(progress);
        }
        unreachable!("loop returns at max_iters")
    }
}

fn symmetrize_in_place(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// NT scaling `R` with `R^{-1} X R^{-T} = R^T Z R = diag(lambda)`.
fn nt_scaling(x: &DMatrix<f64>, z: &DMatrix<f64>) -> Option<Scaling> {
    let lx = nalgebra::Cholesky::new(x.clone())?.l();
    let lz = nalgebra::Cholesky::new(z.clone())?.l();
    let svd = (lz.transpose() * &lx).svd(true, true);
    let u = svd.u?;
    let vt = svd.v_t?;
    let lambda = svd.singular_values;
    if lambda.iter().any(|&l| !l.is_finite() || l <= 0.0) {
        return None;
    }
    let isq = lambda.map(|l| 1.0 / l.sqrt());
    let r = &lx * vt.transpose() * DMatrix::from_diagonal(&isq);
    let rti = &lz * u * DMatrix::from_diagonal(&isq);
    let g = &r * r.transpose();
    Some(Scaling { r, rti, g, lambda })
}

/// Largest step keeping `X`, `Z`, `tau`, `kappa` in their cones.
fn step_length(scal: &[Scaling], d: &Direction, tau: f64, kappa: f64) -> f64 {
    let mut alpha = f64::INFINITY;
    for (k, s) in scal.iter().enumerate() {
        let isq = s.lambda.map(|l| 1.0 / l.sqrt());
        let dmat = DMatrix::from_diagonal(&isq);
        for (m, left) in [(&d.dx[k], &s.rti), (&d.dz[k], &s.r)] {
            let scaled = left.transpose() * m * left;
            let mut t = &dmat * scaled * &dmat;
            symmetrize_in_place(&mut t);
            let min = SymmetricEigen::new(t).eigenvalues.min();
            if min < 0.0 {
                alpha = alpha.min(-1.0 / min);
            }
        }
    }
    if d.dtau < 0.0 {
        alpha = alpha.min(-tau / d.dtau);
    }
    if d.dkappa < 0.0 {
        alpha = alpha.min(-kappa / d.dkappa);
    }
    alpha
}

struct KktSolver {
    chol: Option<nalgebra::Cholesky<f64, nalgebra::Dyn>>,
    lu: Option<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>>,
}

impl KktSolver {
    fn new(mut m: DMatrix<f64>) -> Option<Self> {
        let n = m.nrows();
        let scale = (0..n).map(|i| m[(i, i)]).fold(0.0, f64::max).max(1.0);
        for i in 0..n {
            m[(i, i)] += REGULARIZATION * scale;
        }
        if let Some(chol) = nalgebra::Cholesky::new(m.clone()) {
            return Some(KktSolver {
                chol: Some(chol),
                lu: None,
            });
        }
        let lu = m.lu();
        lu.is_invertible().then_some(KktSolver {
            chol: None,
            lu: Some(lu),
        })
    }

    fn solve(&self, r: &DVector<f64>) -> DVector<f64> {
        if let Some(c) = &self.chol {
            c.solve(r)
        } else {
            self.lu
                .as_ref()
                .and_then(|l| l.solve(r))
                .unwrap_or_else(|| DVector::zeros(r.len()))
        }
    }
}

/// Outcome of [`solve_feasibility`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityResult {
    /// Status of the trace-minimizing screen, or of the bounded re-solve when it ran.
    pub status: SdpStatus,
    /// PSD-projected blocks of the best point found (empty when screened out).
    pub x: Vec<DMatrix<f64>>,
    /// Largest equality violation of `x`.
    pub residual: f64,
    pub trace: f64,
}

impl FeasibilityResult {
    pub fn infeasible(&self) -> bool {
        self.status == SdpStatus::PrimalInfeasible
    }
}

/// Looks for a point of `{X PSD : <A_i, X> = b_i}`, ignoring the objective of `p`.
///
/// A first solve minimizes the total trace. On feasible but non-strictly feasible
/// problems the trace minimizer often has no dual optimum and the embedding drifts,
/// so a second solve with zero objective and the constraint `tr X <= 2 t* + 1` is run,
/// whose dual optimum `y = 0` always exists. The point with the smaller residual after
/// projection onto the PSD cone is returned.
pub fn solve_feasibility(p: &SdpProblem, settings: &Settings) -> Result<FeasibilityResult, SdpError> {
    let nblocks = p.blocks.len();
    let mut trace = Functional::new();
    for (b, &n) in p.blocks.iter().enumerate() {
        for i in 0..n {
            trace.add_term(b, i, i, 1.0);
        }
    }
    let mut screen = p.clone();
    screen.objective = trace.clone();
    screen.sense = Sense::Minimize;
    let first = solve(&screen, settings)?;
    if first.status == SdpStatus::PrimalInfeasible {
        return Ok(FeasibilityResult {
            status: first.status,
            x: Vec::new(),
            residual: f64::INFINITY,
            trace: f64::INFINITY,
        });
    }
    let mut best = project_candidate(p, &first.x[..nblocks], first.status);

    let mut bounded = p.clone();
    bounded.objective = Functional::new();
    let slack = bounded.add_block(1);
    let mut cap = trace;
    cap.add_term(slack, 0, 0, 1.0);
    bounded.add_constraint(cap, 2.0 * best.trace.max(0.0) + 1.0);
    let second = solve(&bounded, settings)?;
    if second.status != SdpStatus::PrimalInfeasible {
        let cand = project_candidate(p, &second.x[..nblocks], second.status);
        if cand.residual <= best.residual || second.status == SdpStatus::Optimal && cand.residual <= 10.0 * best.residual {
            best = cand;
        }
    }
    Ok(best)
}

/// Eigenvalues below this fraction of the largest one are candidates for the kernel
/// in [`polish_on_face`].
const POLISH_KERNEL: f64 = 1e-2;

/// Refines an approximate feasible point on its numerical face.
///
/// Each block is written as `V M V^T` with `V` spanning the retained eigenvectors,
/// and `M` gets the least-norm correction that satisfies the equality constraints.
/// The `j` smallest eigenvalues over all blocks are dropped for `j = 0, 1, ...`
/// while they stay below a fraction of the largest one. Each corrected `M` is
/// projected back onto the PSD cone, and the candidate with the smallest residual
/// is returned when it improves on the projected input.
/// Interior point iterates on problems without a strictly feasible point are only
/// accurate to the square root of the barrier parameter, and their kernel shows no
/// clean spectral gap; this recovers full accuracy once the face is identified.
pub fn polish_on_face(p: &SdpProblem, x: &[DMatrix<f64>]) -> Option<Vec<DMatrix<f64>>> {
    if x.len() != p.blocks.len() {
        return None;
    }
    let eigs: Vec<_> = x.iter().map(|m| linalg::symmetrize(m).0.symmetric_eigen()).collect();
    let top = eigs
        .iter()
        .flat_map(|e| e.eigenvalues.iter().copied())
        .fold(0.0f64, f64::max);
    if top <= 0.0 {
        return None;
    }
    let mut small: Vec<(f64, usize, usize)> = eigs
        .iter()
        .enumerate()
        .flat_map(|(k, e)| e.eigenvalues.iter().enumerate().map(move |(i, &v)| (v, k, i)))
        .filter(|&(v, _, _)| v <= POLISH_KERNEL * top)
        .collect();
    small.sort_by(|a, b| a.0.total_cmp(&b.0));
    let bscale = 1.0 + p.constraints.iter().map(|c| c.rhs.abs()).fold(0.0, f64::max);
    let dense: Vec<Vec<DMatrix<f64>>> = p
        .constraints
        .iter()
        .map(|c| {
            let mut a: Vec<DMatrix<f64>> = p.blocks.iter().map(|&n| DMatrix::zeros(n, n)).collect();
            for (b, i, j, v) in c.lhs.entries() {
                a[b][(i, j)] = v;
                a[b][(j, i)] = v;
            }
            a
        })
        .collect();
    let start: Vec<DMatrix<f64>> = x.iter().map(linalg::project_psd).collect();
    let mut best = (p.primal_residual(&start), None);
    for dropped in 0..=small.len() {
        let gone = &small[..dropped];
        let bases: Vec<(DMatrix<f64>, DVector<f64>)> = eigs
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let keep: Vec<usize> = (0..e.eigenvalues.len())
                    .filter(|&i| e.eigenvalues[i] > 0.0 && !gone.iter().any(|g| g.1 == k && g.2 == i))
                    .collect();
                let v = DMatrix::from_fn(e.eigenvectors.nrows(), keep.len(), |r, c| e.eigenvectors[(r, keep[c])]);
                let lam = DVector::from_iterator(keep.len(), keep.iter().map(|&i| e.eigenvalues[i]));
                (v, lam)
            })
            .collect();
        let vars: Vec<(usize, usize, usize)> = bases
            .iter()
            .enumerate()
            .flat_map(|(k, (v, _))| {
                let r = v.ncols();
                (0..r).flat_map(move |a| (a..r).map(move |b| (k, a, b)))
            })
            .collect();
        let m = p.constraints.len();
        let reduced: Vec<Vec<DMatrix<f64>>> = dense
            .iter()
            .map(|a| a.iter().zip(&bases).map(|(ak, (v, _))| v.transpose() * ak * v).collect())
            .collect();
        let l = DMatrix::from_fn(m, vars.len(), |i, c| {
            let (k, a, b) = vars[c];
            let bk = &reduced[i][k];
            if a == b {
                bk[(a, a)]
            } else {
                2.0 * bk[(a, b)]
            }
        });
        let base: Vec<DMatrix<f64>> = bases
            .iter()
            .map(|(v, lam)| v * DMatrix::from_diagonal(lam) * v.transpose())
            .collect();
        let res = DVector::from_iterator(m, p.constraints.iter().map(|c| c.rhs - c.lhs.evaluate(&base)));
        let delta = if vars.is_empty() {
            DVector::zeros(0)
        } else {
            match l.svd(true, true).solve(&res, 1e-13) {
                Ok(d) => d,
                Err(_) => continue,
            }
        };
        let mut inner: Vec<DMatrix<f64>> = bases.iter().map(|(_, lam)| DMatrix::from_diagonal(lam)).collect();
        for (c, &(k, a, b)) in vars.iter().enumerate() {
            inner[k][(a, b)] += delta[c];
            if a != b {
                inner[k][(b, a)] += delta[c];
            }
        }
        let out: Vec<DMatrix<f64>> = inner
            .iter()
            .zip(&bases)
            .map(|(mk, (v, _))| linalg::symmetrize(&(v * linalg::project_psd(mk) * v.transpose())).0)
            .collect();
        let r = p.primal_residual(&out);
        if r < best.0 {
            best = (r, Some(out));
        }
        if r <= 1e-12 * bscale {
            break;
        }
    }
    best.1
}

fn project_candidate(p: &SdpProblem, x: &[DMatrix<f64>], status: SdpStatus) -> FeasibilityResult {
    let x: Vec<DMatrix<f64>> = x.iter().map(linalg::project_psd).collect();
    FeasibilityResult {
        status,
        residual: p.primal_residual(&x),
        trace: x.iter().map(|m| m.trace()).sum(),
        x,
    }
}

/// Rows of `W` with `W^T W ~= U` and one row per eigenvalue above `tol`.
pub fn psd_factor(u: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>, NotPsd> {
    linalg::psd_factor_f64(u, tol).map_err(|min_eigenvalue| NotPsd { min_eigenvalue })
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
pub struct NotPsd {
    pub min_eigenvalue: f64,
}

/// Outcome of [`lmi_maximize`].
#[derive(Debug, Clone, PartialEq)]
pub struct LmiSolution {
    pub status: LmiStatus,
    pub y: Vec<f64>,
    pub value: f64,
    /// Multiplier matrices for each block of the inequality.
    pub multipliers: Vec<DMatrix<f64>>,
    pub sdp: SdpSolution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LmiStatus {
    Optimal,
    Infeasible,
    Unbounded,
    Unknown,
}

/// One block of an LMI `F_0 + sum y_i F_i PSD`; `coeffs[i]` is `F_{i+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LmiBlock {
    pub constant: DMatrix<f64>,
    pub coeffs: Vec<DMatrix<f64>>,
}

impl LmiBlock {
    /// A scalar inequality `c0 + sum c_i y_i >= 0`.
    pub fn scalar(c0: f64, c: &[f64]) -> Self {
        LmiBlock {
            constant: DMatrix::from_element(1, 1, c0),
            coeffs: c.iter().map(|&v| DMatrix::from_element(1, 1, v)).collect(),
        }
    }
}

/// Maximizes `b^T y` subject to block LMIs `F_0 + sum y_i F_i PSD`, solved as the
/// dual of a standard-form SDP.
pub fn lmi_maximize(blocks: &[LmiBlock], b: &[f64], settings: &Settings) -> Result<LmiSolution, SdpError> {
    let nvars = b.len();
    let mut p = SdpProblem::new(blocks.iter().map(|bl| bl.constant.nrows()).collect(), Sense::Minimize);
    for (k, bl) in blocks.iter().enumerate() {
        p.objective.add_matrix(k, &bl.constant, 1.0);
    }
    for (i, &bi) in b.iter().enumerate() {
        let mut f = Functional::new();
        for (k, bl) in blocks.iter().enumerate() {
            f.add_matrix(k, &bl.coeffs[i], -1.0);
        }
        p.add_constraint(f, bi);
    }
    let sdp = solve(&p, settings)?;
    let status = match sdp.status {
        SdpStatus::Optimal => LmiStatus::Optimal,
        SdpStatus::DualInfeasible => LmiStatus::Infeasible,
        SdpStatus::PrimalInfeasible => {
            // An improving ray only means unbounded when the LMI is feasible at all.
            if b.iter().any(|&v| v != 0.0) {
                let zero = vec![0.0; nvars];
                match lmi_maximize(blocks, &zero, settings)?.status {
                    LmiStatus::Optimal => LmiStatus::Unbounded,
                    LmiStatus::Infeasible => LmiStatus::Infeasible,
                    _ => LmiStatus::Unknown,
                }
            } else {
                LmiStatus::Unknown
            }
        }
        _ => LmiStatus::Unknown,
    };
    let y = if sdp.y.len() == nvars {
        sdp.y.clone()
    } else {
        vec![0.0; nvars]
    };
    Ok(LmiSolution {
        status,
        value: sdp.dual_objective,
        multipliers: sdp.x.clone(),
        y,
        sdp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(block: usize, i: usize, j: usize) -> Functional {
        let mut f = Functional::new();
        f.add_term(block, i, j, 1.0);
        f
    }

    #[test]
    fn scalar_lower_bound() {
        // minimize x s.t. x - s = 1, x, s >= 0
        let mut p = SdpProblem::new(vec![1, 1], Sense::Minimize);
        p.objective.add_term(0, 0, 0, 1.0);
        let mut f = unit(0, 0, 0);
        f.add_term(1, 0, 0, -1.0);
        p.add_constraint(f, 1.0);
        let s = solve(&p, &Settings::default()).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal_objective - 1.0).abs() < 1e-7);
    }

    #[test]
    fn min_eigenvalue_by_trace() {
        let mut p = SdpProblem::new(vec![2], Sense::Minimize);
        p.objective.add_term(0, 0, 0, 1.0);
        p.objective.add_term(0, 1, 1, 2.0);
        let mut f = unit(0, 0, 0);
        f.add_term(0, 1, 1, 1.0);
        p.add_constraint(f, 1.0);
        let s = solve(&p, &Settings::default()).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal_objective - 1.0).abs() < 1e-7);
        assert!((s.dual_objective - 1.0).abs() < 1e-7);
    }

    #[test]
    fn negative_trace_is_infeasible() {
        let mut p = SdpProblem::new(vec![2], Sense::Minimize);
        let mut f = unit(0, 0, 0);
        f.add_term(0, 1, 1, 1.0);
        p.add_constraint(f, -1.0);
        let s = solve(&p, &Settings::default()).unwrap();
        assert_eq!(s.status, SdpStatus::PrimalInfeasible);
        let b: f64 = s.y.iter().zip(&p.constraints).map(|(y, c)| y * c.rhs).sum();
        assert!((b - 1.0).abs() < 1e-7);
        let z = p.adjoint(&s.y);
        assert!(linalg::min_eigenvalue(&(-&z[0])) > -1e-7);
    }

    #[test]
    fn unbounded_is_dual_infeasible() {
        // minimize -X11 s.t. X12 = 0.
        let mut p = SdpProblem::new(vec![2], Sense::Minimize);
        p.objective.add_term(0, 0, 0, -1.0);
        p.add_constraint(unit(0, 0, 1), 0.0);
        let s = solve(&p, &Settings::default()).unwrap();
        assert_eq!(s.status, SdpStatus::DualInfeasible);
        assert!(p.primal_residual(&s.x) < 1e-7);
        assert!((p.objective.evaluate(&s.x) + 1.0).abs() < 1e-7);
    }

    #[test]
    fn inconsistent_rows_detected_in_presolve() {
        let mut p = SdpProblem::new(vec![1], Sense::Minimize);
        p.add_constraint(unit(0, 0, 0), 1.0);
        p.add_constraint(unit(0, 0, 0), 2.0);
        let s = solve(&p, &Settings::default()).unwrap();
        assert_eq!(s.status, SdpStatus::PrimalInfeasible);
        let b: f64 = s.y.iter().zip(&p.constraints).map(|(y, c)| y * c.rhs).sum();
        assert!((b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dependent_rows_are_dropped() {
        let mut p = SdpProblem::new(vec![2], Sense::Maximize);
        p.objective.add_term(0, 0, 1, 1.0);
        let mut f = unit(0, 0, 0);
        f.add_term(0, 1, 1, 1.0);
        p.add_constraint(f.clone(), 2.0);
        p.add_constraint(f.scale_by(3.0), 6.0);
        let s = solve(&p, &Settings::default()).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal_objective - 1.0).abs() < 1e-7, "{}", s.primal_objective);
    }

    #[test]
    fn lmi_maximize_interval() {
        // maximize y s.t. 1 - y >= 0 and [[1, y], [y, 1]] PSD.
        let blocks = vec![
            LmiBlock::scalar(1.0, &[-1.0]),
            LmiBlock {
                constant: DMatrix::identity(2, 2),
                coeffs: vec![DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])],
            },
        ];
        let s = lmi_maximize(&blocks, &[1.0], &Settings::default()).unwrap();
        assert_eq!(s.status, LmiStatus::Optimal);
        assert!((s.y[0] - 1.0).abs() < 1e-6);
        let infeasible = vec![LmiBlock::scalar(-1.0, &[0.0])];
        let s = lmi_maximize(&infeasible, &[1.0], &Settings::default()).unwrap();
        assert_eq!(s.status, LmiStatus::Infeasible);
    }

    #[test]
    fn psd_factor_round_trip() {
        let u = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let w = psd_factor(&u, 1e-12).unwrap();
        assert!(linalg::max_abs(&(w.transpose() * &w - &u)) < 1e-12);
        assert_eq!(psd_factor(&DMatrix::zeros(3, 3), 1e-12).unwrap().nrows(), 0);
        assert!(psd_factor(&DMatrix::from_row_slice(1, 1, &[-1.0]), 1e-9).is_err());
    }
}
