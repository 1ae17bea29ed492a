//! The primal SDP `min l(x) s.t. A(x) PSD`, its standard dual, and the sums of
//! squares dual whose optimum always equals the primal optimum.

use std::fmt;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::gram::{self, GramSosMatrix};
use crate::linalg;
use crate::pencil::{LinearPencil, PencilError};
use crate::poly::{Monomial, MonomialBasis, PolyError, Polynomial};
use crate::scalar::{Rational, Scalar};
use crate::sdp::{self, Functional, LmiBlock, LmiStatus, SdpError, SdpProblem, SdpSolution, SdpStatus, Sense, Settings};
use crate::verify::{self, Certificate, VerificationReport, VerifyError};

/// Radii of the box `|x_i| <= R` used to make the primal solvable.
pub const PRIMAL_RADII: [f64; 6] = [1e1, 1e2, 1e3, 1e4, 1e5, 1e6];
/// Trace bounds used to make the dual problems solvable.
pub const TRACE_BOUNDS: [f64; 6] = [1e1, 1e2, 1e3, 1e4, 1e5, 1e6];
/// A bound counts as inactive once the marginal gain of enlarging it is below this.
const INACTIVE_GAIN: f64 = 1e-7;
/// Threshold on `Dsos*` for a positive functional.
pub const POSITIVITY_TOL: f64 = 1e-7;
/// The primal LMI usually has no interior here, so its value error tracks the solver
/// tolerance; the boxed primal is solved this much tighter.
const PRIMAL_TOL_FACTOR: f64 = 1e-2;

#[derive(Debug, Error)]
pub enum DualError {
    #[error("objective must be linear, found degree {0}")]
    NonlinearObjective(usize),
    #[error("objective has {found} variables, pencil has {expected}")]
    NvarsMismatch { expected: usize, found: usize },
    #[error("basis matrices are linearly dependent")]
    DependentBasis,
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Pencil(#[from] PencilError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

/// `minimize l(x) subject to A(x) PSD`.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpInstance<T> {
    pub pencil: LinearPencil<T>,
    pub objective: Polynomial<T>,
}

impl<T: Scalar> SdpInstance<T> {
    pub fn new(pencil: LinearPencil<T>, objective: Polynomial<T>) -> Result<Self, DualError> {
        if objective.nvars() != pencil.nvars() {
            return Err(DualError::NvarsMismatch {
                expected: pencil.nvars(),
                found: objective.nvars(),
            });
        }
        if objective.degree() > 1 {
            return Err(DualError::NonlinearObjective(objective.degree()));
        }
        Ok(SdpInstance { pencil, objective })
    }

    pub fn to_float(&self) -> SdpInstance<f64> {
        SdpInstance {
            pencil: self.pencil.to_float(),
            objective: self.objective.to_float(),
        }
    }
}

/// The primal kept in inequality form over the free variables `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LmiProgram {
    pub blocks: Vec<LmiBlock>,
    /// Minimize `cost.0 + cost.1 . x`.
    pub cost: (f64, Vec<f64>),
}

/// A standard-form SDP whose objective is shifted by a constant.
#[derive(Debug, Clone, PartialEq)]
pub struct DualProgram {
    pub sdp: SdpProblem,
    pub offset: f64,
}

/// Block positions of the sums of squares dual.
#[derive(Debug, Clone, PartialEq)]
pub struct SosDualLayout {
    pub nvars: usize,
    pub size: usize,
    pub s_block: usize,
    pub c_block: usize,
    /// Gram blocks of the quadratic sos-matrices `S_i`.
    pub gram_blocks: Vec<usize>,
    /// Blocks `[[I, W_i], [W_i^T, U_i]]`.
    pub schur_blocks: Vec<usize>,
    pub linear: MonomialBasis,
    pub quadratic: MonomialBasis,
    /// Monomials of each identity, in constraint order: `n` groups for the chain, then
    /// the final identity without its constant monomial.
    pub groups: Vec<Vec<Monomial>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SosDualProgram {
    pub program: DualProgram,
    pub layout: SosDualLayout,
}

/// A point of the sums of squares dual.
#[derive(Debug, Clone, PartialEq)]
pub struct SosDualSolution<T> {
    pub objective: Polynomial<T>,
    pub a: T,
    /// Nonnegative slack of the constant coefficient.
    pub c: T,
    /// Constant PSD matrix of the final identity.
    pub s: DMatrix<T>,
    pub grams: Vec<GramSosMatrix<T>>,
    pub u: Vec<DMatrix<T>>,
    pub w: Vec<DMatrix<T>>,
}

impl SosDualSolution<f64> {
    pub fn to_exact(&self) -> SosDualSolution<Rational> {
        let ex = |m: &DMatrix<f64>| m.map(Rational::from_f64);
        SosDualSolution {
            objective: self.objective.to_exact(),
            a: Rational::from_f64(self.a),
            c: Rational::from_f64(self.c),
            s: ex(&self.s),
            grams: self.grams.iter().map(|g| g.to_exact()).collect(),
            u: self.u.iter().map(ex).collect(),
            w: self.w.iter().map(ex).collect(),
        }
    }
}

/// The primal as an LMI over `x`, for [`sdp::lmi_maximize`] after negating the cost.
pub fn build_primal(inst: &SdpInstance<f64>) -> Result<LmiProgram, DualError> {
    let (c0, c) = inst.objective.linear_parts()?;
    Ok(LmiProgram {
        blocks: vec![LmiBlock {
            constant: inst.pencil.coeff(0).clone(),
            coeffs: inst.pencil.coeffs()[1..].to_vec(),
        }],
        cost: (c0, c),
    })
}

/// `maximize l_0 - <A_0, S>` over `S` PSD with `<A_i, S> = l_i`, i.e. the largest `a`
/// with `l - a = tr(A S)`.
pub fn build_standard_dual(inst: &SdpInstance<f64>) -> Result<DualProgram, DualError> {
    let (l0, l) = inst.objective.linear_parts()?;
    let a = inst.pencil.size();
    let mut p = SdpProblem::new(vec![a], Sense::Maximize);
    p.objective.add_matrix(0, inst.pencil.coeff(0), -1.0);
    for (i, li) in l.iter().enumerate() {
        let mut f = Functional::new();
        f.add_matrix(0, inst.pencil.coeff(i + 1), 1.0);
        p.add_constraint(f, *li);
    }
    Ok(DualProgram { sdp: p, offset: l0 })
}

/// The sums of squares dual: maximize `a` subject to
///
/// ```text
/// vec_1^T U_i vec_1 + vec_2^T W_{i-1} vec_1 + tr(A S_i) = 0     i = 1..n, W_0 = 0
/// l - a - c + vec_2^T W_n vec_1 - tr(A S) = 0
/// U_i >= W_i^T W_i,  S, S_i sos-matrices,  c >= 0
/// ```
///
/// `a` is free, so the constant coefficient of the last identity is used to
/// eliminate it and the objective becomes `l_0 - c + W_n[0, 0] - <A_0, S>`.
pub fn build_sos_dual(inst: &SdpInstance<f64>) -> Result<SosDualProgram, DualError> {
    let (l0, _) = inst.objective.linear_parts()?;
    let pencil = &inst.pencil;
    let n = pencil.nvars();
    let a = pencil.size();
    let linear = MonomialBasis::new(n, 1);
    let quadratic = MonomialBasis::new(n, 2);
    let constant = MonomialBasis::new(n, 0);
    let support = MonomialBasis::new(n, 3);
    let (s1, s2) = (linear.len(), quadratic.len());

    let mut p = SdpProblem::new(vec![a, 1], Sense::Maximize);
    let gram_blocks: Vec<usize> = (0..n).map(|_| p.add_block(a * s1)).collect();
    let schur_blocks: Vec<usize> = (0..n).map(|_| p.add_block(s2 + s1)).collect();
    let add_w = |rows: &mut [Functional], block: usize, scale: f64| {
        for q in 0..s2 {
            for r in 0..s1 {
                let m = quadratic.get(q).mul(linear.get(r));
                if let Some(row) = support.index_of(&m) {
                    rows[row].add_term(block, q, s2 + r, scale);
                }
            }
        }
    };

    let mut groups = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut rows = vec![Functional::new(); support.len()];
        for q in 0..s1 {
            for r in 0..s1 {
                let m = linear.get(q).mul(linear.get(r));
                let row = support.index_of(&m).expect("quadratic monomial in cubic support");
                rows[row].add_term(schur_blocks[i], s2 + q, s2 + r, 1.0);
            }
        }
        if i > 0 {
            add_w(&mut rows, schur_blocks[i - 1], 1.0);
        }
        gram::add_trace_pair_terms(&mut rows, &support, pencil, gram_blocks[i], &linear, 1.0);
        for row in rows {
            p.add_constraint(row, 0.0);
        }
        groups.push(support.monomials().to_vec());
    }

    let mut rows = vec![Functional::new(); support.len()];
    if let Some(&last) = schur_blocks.last() {
        add_w(&mut rows, last, 1.0);
    }
    gram::add_trace_pair_terms(&mut rows, &support, pencil, 0, &constant, -1.0);
    let mut tail = Vec::new();
    for (row, m) in rows.into_iter().zip(support.monomials()).skip(1) {
        p.add_constraint(row, -inst.objective.coeff(m).to_f64());
        tail.push(m.clone());
    }
    groups.push(tail);

    for &b in &schur_blocks {
        for q in 0..s2 {
            for r in q..s2 {
                let mut f = Functional::new();
                f.add_term(b, q, r, 1.0);
                p.add_constraint(f, if q == r { 1.0 } else { 0.0 });
            }
        }
    }

    p.objective.add_term(1, 0, 0, -1.0);
    p.objective.add_matrix(0, pencil.coeff(0), -1.0);
    if let Some(&last) = schur_blocks.last() {
        p.objective.add_term(last, 0, s2, 1.0);
    }
    Ok(SosDualProgram {
        program: DualProgram { sdp: p, offset: l0 },
        layout: SosDualLayout {
            nvars: n,
            size: a,
            s_block: 0,
            c_block: 1,
            gram_blocks,
            schur_blocks,
            linear,
            quadratic,
            groups,
        },
    })
}

impl SosDualLayout {
    /// Reads a dual point from solver blocks, projecting each piece back onto its cone.
    pub fn extract(&self, inst: &SdpInstance<f64>, x: &[DMatrix<f64>]) -> SosDualSolution<f64> {
        let (s1, s2) = (self.linear.len(), self.quadratic.len());
        let s = linalg::project_psd(&x[self.s_block]);
        let c = x[self.c_block][(0, 0)].max(0.0);
        let grams = self
            .gram_blocks
            .iter()
            .map(|&b| GramSosMatrix {
                size: self.size,
                basis: self.linear.clone(),
                gram: linalg::project_psd(&x[b]),
            })
            .collect();
        let mut u = Vec::with_capacity(self.nvars);
        let mut w = Vec::with_capacity(self.nvars);
        for &b in &self.schur_blocks {
            let wi = x[b].view((0, s2), (s2, s1)).clone_owned();
            let mut ui = linalg::symmetrize(&x[b].view((s2, s2), (s1, s1)).clone_owned()).0;
            // Restore U_i >= W_i^T W_i lost to rounding by a tiny diagonal shift.
            let gap = linalg::min_eigenvalue(&(&ui - wi.transpose() * &wi));
            if gap < 0.0 {
                for k in 0..s1 {
                    ui[(k, k)] -= gap;
                }
            }
            u.push(ui);
            w.push(wi);
        }
        let mut sol = SosDualSolution {
            objective: inst.objective.clone(),
            a: 0.0,
            c,
            s,
            grams,
            u,
            w,
        };
        sol.a = sos_dual_value(&sol, inst.pencil.coeff(0));
        sol
    }
}

/// `a = l_0 - c + W_n[0, 0] - <A_0, S>`, the eliminated variable.
fn sos_dual_value(sol: &SosDualSolution<f64>, a0: &DMatrix<f64>) -> f64 {
    let (l0, _) = sol.objective.linear_parts().unwrap_or((0.0, Vec::new()));
    let wn = sol.w.last().map_or(0.0, |m| m[(0, 0)]);
    l0 - sol.c + wn - a0.dot(&sol.s)
}

/// An optimal value that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptValue {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
    Unknown,
}

impl OptValue {
    pub fn finite(&self) -> Option<f64> {
        match self {
            OptValue::Finite(v) => Some(*v),
            _ => None,
        }
    }
}

impl fmt::Display for OptValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptValue::Finite(v) => write!(f, "{}", format_value(*v)),
            OptValue::PlusInfinity => write!(f, "+inf"),
            OptValue::MinusInfinity => write!(f, "-inf"),
            OptValue::Unknown => write!(f, "?"),
        }
    }
}

/// Rounds to six decimals and drops trailing zeros, printing `-0` as `0`.
pub fn format_value(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    let r = if r == 0.0 { 0.0 } else { r };
    let s = format!("{r:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

/// Optimum of one of the three problems.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub value: OptValue,
    /// The auxiliary bound was inactive at the returned point.
    pub attained: bool,
    pub status: SdpStatus,
    /// Last box radius or trace bound used.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub primal: Optimum,
    pub primal_point: Option<Vec<f64>>,
    pub dual: Optimum,
    pub sos_dual: Optimum,
    pub extracted: Option<SosDualSolution<f64>>,
    pub verification: Option<VerificationReport>,
}

/// Solves the primal over growing boxes `|x_i| <= R`.
pub fn solve_primal(inst: &SdpInstance<f64>, settings: &Settings) -> Result<(Optimum, Option<Vec<f64>>), DualError> {
    solve_primal_with(inst, &PRIMAL_RADII, settings)
}

fn solve_primal_with(
    inst: &SdpInstance<f64>,
    radii: &[f64],
    settings: &Settings,
) -> Result<(Optimum, Option<Vec<f64>>), DualError> {
    let prog = build_primal(inst)?;
    let settings = &Settings {
        tol: settings.tol * PRIMAL_TOL_FACTOR,
        ..*settings
    };
    let n = inst.pencil.nvars();
    let b: Vec<f64> = prog.cost.1.iter().map(|v| -v).collect();
    let mut prev: Option<f64> = None;
    let mut last = None;
    for &r in radii {
        let mut blocks = prog.blocks.clone();
        for i in 0..n {
            for sign in [1.0, -1.0] {
                let mut c = vec![0.0; n];
                c[i] = sign;
                blocks.push(LmiBlock::scalar(r, &c));
            }
        }
        let sol = sdp::lmi_maximize(&blocks, &b, settings)?;
        match sol.status {
            LmiStatus::Infeasible => {
                return Ok((
                    Optimum {
                        value: OptValue::PlusInfinity,
                        attained: false,
                        status: sol.sdp.status,
                        bound: r,
                    },
                    None,
                ))
            }
            LmiStatus::Optimal => {
                let value = prog.cost.0 - sol.value;
                let gain: f64 = sol.multipliers[1..].iter().map(|m| m[(0, 0)]).sum::<f64>() * r;
                let stable = prev.is_some_and(|p| (p - value).abs() <= INACTIVE_GAIN * (1.0 + value.abs()));
                let attained = gain <= INACTIVE_GAIN * (1.0 + value.abs());
                let opt = Optimum {
                    value: OptValue::Finite(value),
                    attained,
                    status: sol.sdp.status,
                    bound: r,
                };
                if attained || stable {
                    return Ok((opt, Some(sol.y)));
                }
                prev = Some(value);
                last = Some((opt, Some(sol.y)));
            }
            _ => {
                last = Some((
                    Optimum {
                        value: OptValue::Unknown,
                        attained: false,
                        status: sol.sdp.status,
                        bound: r,
                    },
                    None,
                ));
            }
        }
    }
    let (mut opt, x) = last.expect("at least one radius");
    // Still decreasing at the largest box: unbounded below.
    if let (OptValue::Finite(v), Some(p)) = (opt.value, prev) {
        if p - v > 1e-3 * (1.0 + v.abs()) {
            opt.value = OptValue::MinusInfinity;
        }
    }
    Ok((opt, x))
}

/// Maximizes a dual program under growing trace bounds `sum tr X <= T`.
pub fn solve_bounded_dual(prog: &DualProgram, settings: &Settings) -> Result<(Optimum, Option<SdpSolution>), DualError> {
    let p = &prog.sdp;
    let mut bounded = p.clone();
    let slack = bounded.add_block(1);
    let mut cap = Functional::new();
    for (b, &n) in p.blocks.iter().enumerate() {
        for i in 0..n {
            cap.add_term(b, i, i, 1.0);
        }
    }
    cap.add_term(slack, 0, 0, 1.0);
    let cap_row = bounded.add_constraint(cap, 0.0);
    let mut prev: Option<f64> = None;
    let mut last: Option<(Optimum, Option<SdpSolution>)> = None;
    for &t in &TRACE_BOUNDS {
        bounded.constraints[cap_row].rhs = t;
        let sol = sdp::solve(&bounded, settings)?;
        match sol.status {
            SdpStatus::Optimal => {
                let value = prog.offset + sol.primal_objective;
                let gain = sol.y[cap_row].abs() * t;
                let stable = prev.is_some_and(|p| (p - value).abs() <= INACTIVE_GAIN * (1.0 + value.abs()));
                let attained = gain <= INACTIVE_GAIN * (1.0 + value.abs());
                let opt = Optimum {
                    value: OptValue::Finite(value),
                    attained,
                    status: sol.status,
                    bound: t,
                };
                let mut sol = sol;
                sol.x.truncate(p.blocks.len());
                if attained || stable {
                    return Ok((opt, Some(sol)));
                }
                prev = Some(value);
                last = Some((opt, Some(sol)));
            }
            status => {
                if last.is_none() || status != SdpStatus::PrimalInfeasible {
                    last = Some((
                        Optimum {
                            value: if status == SdpStatus::PrimalInfeasible {
                                OptValue::MinusInfinity
                            } else {
                                OptValue::Unknown
                            },
                            attained: false,
                            status,
                            bound: t,
                        },
                        None,
                    ));
                }
            }
        }
    }
    let (mut opt, sol) = last.expect("at least one bound");
    if let (OptValue::Finite(v), Some(p)) = (opt.value, prev) {
        if v - p > 1e-3 * (1.0 + v.abs()) {
            opt.value = OptValue::PlusInfinity;
        }
    }
    Ok((opt, sol))
}

/// Solves the primal, the standard dual and the sums of squares dual, and verifies the
/// extracted sums of squares dual point.
pub fn gap_report(inst: &SdpInstance<f64>, settings: &Settings) -> Result<GapReport, DualError> {
    let (primal, primal_point) = solve_primal(inst, settings)?;
    let (dual, _) = solve_bounded_dual(&build_standard_dual(inst)?, settings)?;
    let sos = build_sos_dual(inst)?;
    let (sos_dual, sol) = solve_bounded_dual(&sos.program, settings)?;
    let mut extracted = None;
    let mut verification = None;
    if let (Some(sol), Some(_)) = (sol, sos_dual.value.finite()) {
        let point = sos.layout.extract(inst, &sol.x);
        let report = verify::verify_certificate(&inst.pencil, &Certificate::SosDual(point.clone()))?;
        verification = Some(report);
        extracted = Some(point);
    }
    Ok(GapReport {
        primal,
        primal_point,
        dual,
        sos_dual,
        extracted,
        verification,
    })
}

/// Answer of [`functional_positivity`].
#[derive(Debug, Clone, PartialEq)]
pub enum Positivity {
    /// A verified sums of squares dual point with `a >= 0` for `f_A`.
    Positive(Box<SosDualSolution<f64>>),
    /// `R` in the cone spanned by the basis with `f(R) < 0`.
    NotPositive { witness: DMatrix<f64>, x: Vec<f64>, value: f64 },
    /// The dual value is nonnegative but its point did not verify.
    Unknown,
}

/// Decides whether the linear functional with `f(A_i) = values[i]` is nonnegative on
/// the PSD matrices of the span of the basis.
pub fn functional_positivity(
    basis: &[DMatrix<f64>],
    values: &[f64],
    settings: &Settings,
) -> Result<Positivity, DualError> {
    if basis.is_empty() || basis.len() != values.len() {
        return Err(DualError::Shape(format!(
            "{} basis matrices for {} values",
            basis.len(),
            values.len()
        )));
    }
    let a = basis[0].nrows();
    let n = basis.len();
    let gram = DMatrix::from_fn(n, n, |i, j| basis[i].dot(&basis[j]));
    let scale = gram.diagonal().max().max(1.0);
    let eig = gram.symmetric_eigenvalues();
    if eig.iter().any(|&v| v <= 1e-10 * scale) {
        return Err(DualError::DependentBasis);
    }
    let mut coeffs = vec![DMatrix::zeros(a, a)];
    coeffs.extend(basis.iter().cloned());
    let pencil = LinearPencil::new(coeffs)?;
    let inst = SdpInstance::new(pencil, Polynomial::linear(0.0, values))?;
    let sos = build_sos_dual(&inst)?;
    let (opt, sol) = solve_bounded_dual(&sos.program, settings)?;
    if let (Some(v), Some(sol)) = (opt.value.finite(), sol) {
        if v >= -POSITIVITY_TOL {
            let point = sos.layout.extract(&inst, &sol.x);
            let report = verify::verify_certificate(&inst.pencil, &Certificate::SosDual(point.clone()))?;
            return Ok(if report.pass {
                Positivity::Positive(Box::new(point))
            } else {
                Positivity::Unknown
            });
        }
    }
    let (p, x) = solve_primal_with(&inst, &[1.0], settings)?;
    match (p.value.finite(), x) {
        (Some(v), Some(x)) if v < 0.0 => {
            let witness = inst.pencil.evaluate(&x)?;
            Ok(Positivity::NotPositive { witness, x, value: v })
        }
        _ => Ok(Positivity::Unknown),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fm(rows: &[&[f64]]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
    }

    #[test]
    fn format_value_rounding() {
        assert_eq!(format_value(-1e-9), "0");
        assert_eq!(format_value(-1.0000004), "-1");
        assert_eq!(format_value(0.5), "0.5");
        assert_eq!(format_value(2.0), "2");
    }

    #[test]
    fn instance_rejects_bad_objectives() {
        let a = LinearPencil::new(vec![fm(&[&[1.0]]), fm(&[&[1.0]])]).unwrap();
        assert!(SdpInstance::new(a.clone(), Polynomial::parse("x1^2", 1).unwrap()).is_err());
        assert!(SdpInstance::new(a.clone(), Polynomial::parse("x1", 2).unwrap()).is_err());
        assert!(SdpInstance::new(a, Polynomial::parse("x1", 1).unwrap()).is_ok());
    }

    #[test]
    fn interval_has_no_gap() {
        // min x subject to diag(1 + x, 1 - x) PSD is -1.
        let a = LinearPencil::new(vec![fm(&[&[1.0, 0.0], &[0.0, 1.0]]), fm(&[&[1.0, 0.0], &[0.0, -1.0]])]).unwrap();
        let inst = SdpInstance::new(a, Polynomial::parse("x1", 1).unwrap()).unwrap();
        let r = gap_report(&inst, &Settings::default()).unwrap();
        for v in [r.primal.value, r.dual.value, r.sos_dual.value] {
            assert!((v.finite().unwrap() + 1.0).abs() < 1e-6, "{v}");
        }
        assert!(r.verification.is_some_and(|v| v.pass));
    }

    #[test]
    fn functional_positivity_cases() {
        let basis = [fm(&[&[1.0, 0.0], &[0.0, 0.0]]), fm(&[&[0.0, 0.0], &[0.0, 1.0]])];
        let s = &Settings::default();
        assert!(matches!(
            functional_positivity(&basis, &[1.0, 2.0], s).unwrap(),
            Positivity::Positive(_)
        ));
        match functional_positivity(&basis, &[1.0, -1.0], s).unwrap() {
            Positivity::NotPositive { witness, value, .. } => {
                assert!(value < 0.0);
                assert!(linalg::min_eigenvalue(&witness) >= -1e-7);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(functional_positivity(&basis, &[1.0], s).is_err());
        assert!(functional_positivity(&[basis[0].clone(), basis[0].clone()], &[1.0, 1.0], s).is_err());
    }
}
