//! Independent certificate checking by symbolic expansion and PSD tests, and
//! conversion of float certificates into exact ones.
//!
//! Nothing here calls the SDP solver except [`check_eps_membership`], whose
//! result is itself run through [`verify_certificate`].

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_traits::Zero;
use thiserror::Error;

use crate::certificates::{
    bound_targets, find_membership, BoundednessCertificate, CertError, InfeasibilityCertificate, LowDimCertificate,
    MembershipCertificate, Search,
};
use crate::duals::SosDualSolution;
use crate::gram::{GramSos, GramSosMatrix};
use crate::linalg;
use crate::pencil::{trace_pair, LinearPencil};
use crate::poly::{Monomial, MonomialBasis, Polynomial};
use crate::scalar::{limit_denominator, Rational, Scalar};
use crate::sdp::Settings;

/// Residual and PSD tolerance for float certificates.
pub const FLOAT_TOL: f64 = 1e-6;

/// Every certificate the library emits.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate<T> {
    Infeasibility(InfeasibilityCertificate<T>),
    LowDim(LowDimCertificate<T>),
    Boundedness(BoundednessCertificate<T>),
    Membership(MembershipCertificate<T>),
    SosDual(SosDualSolution<T>),
}

impl<T: Scalar> Certificate<T> {
    pub fn type_tag(&self) -> &'static str {
        match self {
            Certificate::Infeasibility(_) => "infeasibility",
            Certificate::LowDim(_) => "lowdim",
            Certificate::Boundedness(_) => "boundedness",
            Certificate::Membership(_) => "membership",
            Certificate::SosDual(_) => "sos-dual",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("malformed certificate: {0}")]
    Malformed(String),
}

fn malformed<R>(msg: impl Into<String>) -> Result<R, VerifyError> {
    Err(VerifyError::Malformed(msg.into()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub cert_type: String,
    /// `(label, max coefficient magnitude)` per polynomial identity.
    pub identity_residuals: Vec<(String, f64)>,
    /// `(label, smallest eigenvalue or LDL pivot)` per PSD condition.
    pub psd_margins: Vec<(String, f64)>,
    pub pass: bool,
    pub mode: String,
}

impl VerificationReport {
    pub fn max_residual(&self) -> f64 {
        self.identity_residuals.iter().map(|r| r.1).fold(0.0, f64::max)
    }

    pub fn min_margin(&self) -> f64 {
        self.psd_margins.iter().map(|r| r.1).fold(f64::INFINITY, f64::min)
    }
}

struct Checker<T> {
    report: VerificationReport,
    _mode: std::marker::PhantomData<T>,
}

impl<T: Scalar> Checker<T> {
    fn new(tag: &str) -> Self {
        Checker {
            report: VerificationReport {
                cert_type: tag.to_string(),
                identity_residuals: Vec::new(),
                psd_margins: Vec::new(),
                pass: true,
                mode: T::MODE.to_string(),
            },
            _mode: std::marker::PhantomData,
        }
    }

    fn identity(&mut self, label: impl Into<String>, residual: &Polynomial<T>) {
        let size = residual.max_abs_coeff();
        let ok = if T::EXACT { residual.is_zero() } else { size <= FLOAT_TOL };
        self.report.pass &= ok;
        self.report.identity_residuals.push((label.into(), size));
    }

    fn psd(&mut self, label: impl Into<String>, m: &DMatrix<T>) {
        let check = if T::EXACT {
            linalg::ldl_psd(m)
        } else {
            linalg::eigen_psd(&m.map(|v| v.to_f64()), FLOAT_TOL)
        };
        let ok = check.is_psd && (T::EXACT || linalg::is_symmetric(m));
        self.report.pass &= ok;
        self.report.psd_margins.push((label.into(), check.margin));
    }

    fn condition(&mut self, ok: bool) {
        self.report.pass &= ok;
    }
}

fn check_gram_sos<T: Scalar>(g: &GramSos<T>, nvars: usize, level: usize) -> Result<(), VerifyError> {
    let b = &g.basis;
    if b.nvars() != nvars || b.degree() != level {
        return malformed(format!(
            "sos basis has {} variables and degree {}, expected {nvars} and {level}",
            b.nvars(),
            b.degree()
        ));
    }
    if g.gram.nrows() != b.len() || g.gram.ncols() != b.len() {
        return malformed(format!("sos Gram matrix must be {0}x{0}", b.len()));
    }
    Ok(())
}

fn check_gram_matrix<T: Scalar>(g: &GramSosMatrix<T>, size: usize, nvars: usize, level: usize) -> Result<(), VerifyError> {
    let b = &g.basis;
    if g.size != size || b.nvars() != nvars || b.degree() != level {
        return malformed(format!(
            "sos-matrix of size {} over {} variables and degree {}, expected {size}, {nvars}, {level}",
            g.size,
            b.nvars(),
            b.degree()
        ));
    }
    let dim = size * b.len();
    if g.gram.nrows() != dim || g.gram.ncols() != dim {
        return malformed(format!("sos-matrix Gram must be {dim}x{dim}"));
    }
    Ok(())
}

fn tr<T: Scalar>(pencil: &LinearPencil<T>, g: &GramSosMatrix<T>) -> Polynomial<T> {
    trace_pair(pencil, &g.expand()).expect("sizes checked")
}

fn membership_identity<T: Scalar>(
    pencil: &LinearPencil<T>,
    c: &mut Checker<T>,
    label: &str,
    target: &Polynomial<T>,
    level: usize,
    s: &GramSos<T>,
    big: &GramSosMatrix<T>,
) -> Result<(), VerifyError> {
    let n = pencil.nvars();
    if target.nvars() != n {
        return malformed(format!("target has {} variables, pencil has {n}", target.nvars()));
    }
    check_gram_sos(s, n, level)?;
    check_gram_matrix(big, pencil.size(), n, level)?;
    let residual = &(&s.expand() + &tr(pencil, big)) - target;
    c.identity(label, &residual);
    c.psd(format!("{label}: s"), &s.gram);
    c.psd(format!("{label}: S"), &big.gram);
    Ok(())
}

/// Checks every identity and PSD condition of `cert` against `pencil`.
pub fn verify_certificate<T: Scalar>(
    pencil: &LinearPencil<T>,
    cert: &Certificate<T>,
) -> Result<VerificationReport, VerifyError> {
    let n = pencil.nvars();
    let mut c = Checker::<T>::new(cert.type_tag());
    match cert {
        Certificate::Infeasibility(k) => {
            let target = Polynomial::constant(n, -T::one());
            membership_identity(pencil, &mut c, "-1 = s + tr(AS)", &target, k.level, &k.s, &k.big)?;
        }
        Certificate::Membership(m) => {
            membership_identity(pencil, &mut c, "f = s + tr(AS)", &m.target, m.level, &m.s, &m.big)?;
        }
        Certificate::LowDim(l) => {
            if l.f.nvars() != n || l.f.degree() > 1 {
                return malformed("f must be a linear polynomial in the pencil's variables");
            }
            check_gram_sos(&l.s, n, 1)?;
            check_gram_matrix(&l.big, pencil.size(), n, 1)?;
            let residual = &(&(&l.f * &l.f) + &l.s.expand()) + &tr(pencil, &l.big);
            c.identity("f^2 + s + tr(AS) = 0", &residual);
            c.psd("s", &l.s.gram);
            c.psd("S", &l.big.gram);
            let nonzero = if T::EXACT {
                !l.f.is_zero()
            } else {
                l.f.max_abs_coeff() >= crate::certificates::LOWDIM_MIN_NORM
            };
            c.condition(nonzero);
        }
        Certificate::Boundedness(b) => {
            if b.certs.len() != 2 * n {
                return malformed(format!("expected {} memberships, found {}", 2 * n, b.certs.len()));
            }
            c.condition(b.bound >= T::zero());
            for (m, target) in b.certs.iter().zip(bound_targets(n, &b.bound)) {
                if m.level != b.level {
                    return malformed("membership level differs from the certificate level");
                }
                let label = format!("{target} = s + tr(AS)");
                membership_identity(pencil, &mut c, &label, &target, b.level, &m.s, &m.big)?;
            }
        }
        Certificate::SosDual(d) => verify_sos_dual(pencil, d, &mut c)?,
    }
    Ok(c.report)
}

fn verify_sos_dual<T: Scalar>(
    pencil: &LinearPencil<T>,
    d: &SosDualSolution<T>,
    c: &mut Checker<T>,
) -> Result<(), VerifyError> {
    let n = pencil.nvars();
    let a = pencil.size();
    let linear = MonomialBasis::new(n, 1);
    let quadratic = MonomialBasis::new(n, 2);
    let (s1, s2) = (linear.len(), quadratic.len());
    if d.objective.nvars() != n || d.objective.degree() > 1 {
        return malformed("objective must be linear in the pencil's variables");
    }
    if d.grams.len() != n || d.u.len() != n || d.w.len() != n {
        return malformed(format!("expected {n} sos-matrices, U and W blocks"));
    }
    if d.s.nrows() != a || d.s.ncols() != a {
        return malformed(format!("S must be {a}x{a}"));
    }
    for i in 0..n {
        check_gram_matrix(&d.grams[i], a, n, 1)?;
        if d.u[i].shape() != (s1, s1) || d.w[i].shape() != (s2, s1) {
            return malformed(format!("U_{0} must be {s1}x{s1} and W_{0} {s2}x{s1}", i + 1));
        }
    }
    let bilinear = |w: &DMatrix<T>| {
        let mut p = Polynomial::zero(n);
        for q in 0..s2 {
            for r in 0..s1 {
                if !w[(q, r)].is_zero() {
                    p.add_term(quadratic.get(q).mul(linear.get(r)), w[(q, r)].clone());
                }
            }
        }
        p
    };
    for i in 0..n {
        let quad = GramSos {
            basis: linear.clone(),
            gram: d.u[i].clone(),
        }
        .expand();
        let mut residual = &quad + &tr(pencil, &d.grams[i]);
        if i > 0 {
            residual = &residual + &bilinear(&d.w[i - 1]);
        }
        c.identity(format!("identity {}", i + 1), &residual);
    }
    let s_mat = GramSosMatrix {
        size: a,
        basis: MonomialBasis::new(n, 0),
        gram: d.s.clone(),
    };
    let mut last = &d.objective - &Polynomial::constant(n, d.a.clone() + d.c.clone());
    if let Some(w) = d.w.last() {
        last = &last + &bilinear(w);
    }
    last = &last - &tr(pencil, &s_mat);
    c.identity("l - a - c + vec2^T W_n vec1 - tr(AS)", &last);
    c.psd("S", &d.s);
    c.psd("c", &DMatrix::from_element(1, 1, d.c.clone()));
    for i in 0..n {
        c.psd(format!("S_{}", i + 1), &d.grams[i].gram);
        let mut block = linalg::zeros::<T>(s2 + s1, s2 + s1);
        for q in 0..s2 {
            block[(q, q)] = T::one();
            for r in 0..s1 {
                block[(q, s2 + r)] = d.w[i][(q, r)].clone();
                block[(s2 + r, q)] = d.w[i][(q, r)].clone();
            }
        }
        for q in 0..s1 {
            for r in 0..s1 {
                block[(s2 + q, s2 + r)] = d.u[i][(q, r)].clone();
            }
        }
        c.psd(format!("[[I, W_{0}], [W_{0}^T, U_{0}]]", i + 1), &block);
    }
    Ok(())
}

/// Searches `f + eps` in `M_A^(k)`; a hit proves `f >= -eps` on the spectrahedron.
pub fn check_eps_membership(
    pencil: &LinearPencil<f64>,
    f: &Polynomial<f64>,
    eps: f64,
    k: usize,
    settings: &Settings,
) -> Result<Search<MembershipCertificate<f64>>, CertError> {
    if eps < 0.0 || !eps.is_finite() {
        return Err(CertError::Invalid(format!("eps must be nonnegative, got {eps}")));
    }
    if f.degree() > 1 {
        return Err(CertError::Invalid("f must be linear".into()));
    }
    let target = f + &Polynomial::constant(f.nvars(), eps);
    find_membership(pencil, &target, k, settings)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RationalizeError {
    #[error("rounded data cannot satisfy the identities")]
    Inconsistent,
    #[error("projected certificate fails exact verification (residual {residual:e}, margin {margin:e})")]
    NotPsd { residual: f64, margin: f64 },
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

fn round_matrix(m: &DMatrix<f64>, denom: u64) -> DMatrix<Rational> {
    let mut out = m.map(|v| limit_denominator(v, denom));
    for i in 0..out.nrows() {
        for j in 0..i {
            out[(i, j)] = out[(j, i)].clone();
        }
    }
    out
}

fn round_poly(p: &Polynomial<f64>, denom: u64) -> Polynomial<Rational> {
    p.map_coeffs(|v| limit_denominator(*v, denom))
}

/// Moves `blocks[free]` by the least-norm symmetric correction that makes
/// `residual(blocks)` vanish exactly. `residual` must be affine in the free blocks.
///
/// Rows whose rounded diagonal is zero are first pinned to zero so that the
/// correction cannot push a singular Gram matrix off the PSD cone. If the
/// pinned system is inconsistent the projection is retried over all entries.
fn project_exact(
    blocks: &mut [DMatrix<Rational>],
    free: &[usize],
    residual: impl Fn(&[DMatrix<Rational>]) -> Polynomial<Rational>,
) -> Result<(), RationalizeError> {
    let mut pinned = blocks.to_vec();
    let mut dead: Vec<Vec<bool>> = vec![Vec::new(); blocks.len()];
    for &b in free {
        let dim = pinned[b].nrows();
        dead[b] = (0..dim).map(|i| pinned[b][(i, i)].is_zero()).collect();
        for i in 0..dim {
            for j in 0..dim {
                if dead[b][i] || dead[b][j] {
                    pinned[b][(i, j)] = Rational::from_i64(0);
                }
            }
        }
    }
    if dead.iter().flatten().any(|&d| d) && project_restricted(&mut pinned, free, &dead, &residual).is_ok() {
        blocks.clone_from_slice(&pinned);
        return Ok(());
    }
    let none: Vec<Vec<bool>> = blocks.iter().map(|m| vec![false; m.nrows()]).collect();
    project_restricted(blocks, free, &none, &residual)
}

fn project_restricted(
    blocks: &mut [DMatrix<Rational>],
    free: &[usize],
    dead: &[Vec<bool>],
    residual: impl Fn(&[DMatrix<Rational>]) -> Polynomial<Rational>,
) -> Result<(), RationalizeError> {
    let r0 = residual(blocks);
    if r0.is_zero() {
        return Ok(());
    }
    let mut vars = Vec::new();
    let mut cols: Vec<Polynomial<Rational>> = Vec::new();
    for &b in free {
        let dim = blocks[b].nrows();
        for i in (0..dim).filter(|&i| !dead[b][i]) {
            for j in (i..dim).filter(|&j| !dead[b][j]) {
                let mut probe = blocks.to_vec();
                probe[b][(i, j)] += Rational::from_i64(1);
                if i != j {
                    probe[b][(j, i)] += Rational::from_i64(1);
                }
                let col = &residual(&probe) - &r0;
                vars.push((b, i, j));
                cols.push(col);
            }
        }
    }
    let mut rows: BTreeMap<Monomial, usize> = BTreeMap::new();
    for p in cols.iter().chain(std::iter::once(&r0)) {
        for (m, _) in p.terms() {
            let next = rows.len();
            rows.entry(m.clone()).or_insert(next);
        }
    }
    let nr = rows.len();
    let mut l = vec![vec![Rational::from_i64(0); vars.len()]; nr];
    for (k, col) in cols.iter().enumerate() {
        for (m, v) in col.terms() {
            l[rows[m]][k] = v.clone();
        }
    }
    let mut rhs = vec![Rational::from_i64(0); nr];
    for (m, v) in r0.terms() {
        rhs[rows[m]] = -v.clone();
    }
    // Least-norm solution delta = L^T y with (L L^T) y = rhs.
    let llt: Vec<Vec<Rational>> = (0..nr)
        .map(|i| {
            (0..nr)
                .map(|j| {
                    l[i].iter()
                        .zip(&l[j])
                        .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                        .fold(Rational::from_i64(0), |acc, (a, b)| acc + a * b)
                })
                .collect()
        })
        .collect();
    let y = linalg::solve_consistent(&llt, &rhs, nr).ok_or(RationalizeError::Inconsistent)?;
    for (k, &(b, i, j)) in vars.iter().enumerate() {
        let delta = (0..nr)
            .filter(|&r| !l[r][k].is_zero() && !y[r].is_zero())
            .fold(Rational::from_i64(0), |acc, r| acc + &l[r][k] * &y[r]);
        if delta.is_zero() {
            continue;
        }
        blocks[b][(i, j)] += delta.clone();
        if i != j {
            blocks[b][(j, i)] += delta;
        }
    }
    Ok(())
}

fn project_membership(
    pencil: &LinearPencil<Rational>,
    target: &Polynomial<Rational>,
    s: &GramSos<f64>,
    big: &GramSosMatrix<f64>,
    denom: u64,
) -> Result<(GramSos<Rational>, GramSosMatrix<Rational>), RationalizeError> {
    let mut blocks = vec![round_matrix(&s.gram, denom), round_matrix(&big.gram, denom)];
    let size = big.size;
    let basis = s.basis.clone();
    let build = |b: &[DMatrix<Rational>]| {
        (
            GramSos {
                basis: basis.clone(),
                gram: b[0].clone(),
            },
            GramSosMatrix {
                size,
                basis: basis.clone(),
                gram: b[1].clone(),
            },
        )
    };
    project_exact(&mut blocks, &[0, 1], |b| {
        let (s, big) = build(b);
        &(&s.expand() + &tr(pencil, &big)) - target
    })?;
    Ok(build(&blocks))
}

/// Rounds a float certificate to rationals with denominators at most `denom_bound`,
/// projects it exactly onto its identities and re-verifies it in exact arithmetic.
pub fn rationalize(
    pencil: &LinearPencil<Rational>,
    cert: &Certificate<f64>,
    denom_bound: u64,
) -> Result<Certificate<Rational>, RationalizeError> {
    let n = pencil.nvars();
    let exact = match cert {
        Certificate::Infeasibility(k) => {
            let target = Polynomial::constant(n, -Rational::from_i64(1));
            let (s, big) = project_membership(pencil, &target, &k.s, &k.big, denom_bound)?;
            Certificate::Infeasibility(InfeasibilityCertificate {
                level: k.level,
                s,
                big,
                residual: 0.0,
            })
        }
        Certificate::Membership(m) => {
            let target = round_poly(&m.target, denom_bound);
            let (s, big) = project_membership(pencil, &target, &m.s, &m.big, denom_bound)?;
            Certificate::Membership(MembershipCertificate {
                target,
                level: m.level,
                s,
                big,
            })
        }
        Certificate::LowDim(l) => {
            let f = round_poly(&l.f, denom_bound);
            let target = -(&f * &f);
            let (s, big) = project_membership(pencil, &target, &l.s, &l.big, denom_bound)?;
            Certificate::LowDim(LowDimCertificate {
                f,
                s,
                big,
                residual: 0.0,
            })
        }
        Certificate::Boundedness(b) => {
            let bound = limit_denominator(b.bound, denom_bound);
            let mut certs = Vec::with_capacity(b.certs.len());
            for (m, target) in b.certs.iter().zip(bound_targets(n, &bound)) {
                let (s, big) = project_membership(pencil, &target, &m.s, &m.big, denom_bound)?;
                certs.push(MembershipCertificate {
                    target,
                    level: m.level,
                    s,
                    big,
                });
            }
            Certificate::Boundedness(BoundednessCertificate {
                bound,
                level: b.level,
                certs,
                residual: 0.0,
            })
        }
        Certificate::SosDual(d) => Certificate::SosDual(rationalize_sos_dual(pencil, d, denom_bound)?),
    };
    let report = verify_certificate(pencil, &exact)?;
    if !report.pass {
        return Err(RationalizeError::NotPsd {
            residual: report.max_residual(),
            margin: report.min_margin(),
        });
    }
    Ok(exact)
}

fn rationalize_sos_dual(
    pencil: &LinearPencil<Rational>,
    d: &SosDualSolution<f64>,
    denom: u64,
) -> Result<SosDualSolution<Rational>, RationalizeError> {
    let n = pencil.nvars();
    let a = pencil.size();
    let linear = MonomialBasis::new(n, 1);
    let quadratic = MonomialBasis::new(n, 2);
    let w: Vec<DMatrix<Rational>> = d.w.iter().map(|m| m.map(|v| limit_denominator(v, denom))).collect();
    let bilinear = |w: &DMatrix<Rational>| {
        let mut p = Polynomial::zero(n);
        for q in 0..quadratic.len() {
            for r in 0..linear.len() {
                p.add_term(quadratic.get(q).mul(linear.get(r)), w[(q, r)].clone());
            }
        }
        p
    };
    let mut u = Vec::with_capacity(n);
    let mut grams = Vec::with_capacity(n);
    for i in 0..n {
        let mut blocks = vec![round_matrix(&d.u[i], denom), round_matrix(&d.grams[i].gram, denom)];
        let prev = (i > 0).then(|| bilinear(&w[i - 1]));
        project_exact(&mut blocks, &[0, 1], |b| {
            let quad = GramSos {
                basis: linear.clone(),
                gram: b[0].clone(),
            }
            .expand();
            let g = GramSosMatrix {
                size: a,
                basis: linear.clone(),
                gram: b[1].clone(),
            };
            let mut r = &quad + &tr(pencil, &g);
            if let Some(p) = &prev {
                r = &r + p;
            }
            r
        })?;
        grams.push(GramSosMatrix {
            size: a,
            basis: linear.clone(),
            gram: blocks.pop().expect("two blocks"),
        });
        u.push(blocks.pop().expect("one block"));
    }
    let objective = round_poly(&d.objective, denom);
    let av = limit_denominator(d.a, denom);
    let mut blocks = vec![round_matrix(&d.s, denom), DMatrix::from_element(1, 1, limit_denominator(d.c, denom))];
    let tail = w.last().map(bilinear);
    project_exact(&mut blocks, &[0, 1], |b| {
        let s_mat = GramSosMatrix {
            size: a,
            basis: MonomialBasis::new(n, 0),
            gram: b[0].clone(),
        };
        let mut r = &objective - &Polynomial::constant(n, av.clone() + b[1][(0, 0)].clone());
        if let Some(t) = &tail {
            r = &r + t;
        }
        &r - &tr(pencil, &s_mat)
    })?;
    Ok(SosDualSolution {
        objective: objective.clone(),
        a: av,
        c: blocks[1][(0, 0)].clone(),
        s: blocks[0].clone(),
        grams,
        u,
        w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = Rational;

    fn qm(rows: &[&[i64]]) -> DMatrix<Q> {
        DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| Q::from_i64(rows[i][j]))
    }

    fn ex51() -> LinearPencil<Q> {
        LinearPencil::new(vec![qm(&[&[0, 1], &[1, 0]]), qm(&[&[1, 0], &[0, 0]])]).unwrap()
    }

    /// `-1 = tr(A u u^T) / 2` with `u = (1, -1 - x/2)`.
    fn ex51_cert() -> InfeasibilityCertificate<Q> {
        let u = vec![
            Polynomial::parse("1", 1).unwrap(),
            Polynomial::parse("-1 - 1/2*x1", 1).unwrap(),
        ];
        InfeasibilityCertificate {
            level: 1,
            s: GramSos::zero(1, 1),
            big: {
                let mut g = GramSosMatrix::from_vectors(2, 1, 1, &[u]).unwrap();
                g.gram /= Q::from_i64(2);
                g
            },
            residual: 0.0,
        }
    }

    #[test]
    fn exact_certificate_passes_with_zero_residual() {
        let r = verify_certificate(&ex51(), &Certificate::Infeasibility(ex51_cert())).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.max_residual(), 0.0);
        assert_eq!(r.mode, "exact");
        assert_eq!(r.cert_type, "infeasibility");
    }

    #[test]
    fn identity_and_psd_failures_are_reported() {
        let mut c = ex51_cert();
        c.big.gram[(0, 0)] += Q::from_ratio(1, 1000);
        let r = verify_certificate(&ex51(), &Certificate::Infeasibility(c)).unwrap();
        assert!(!r.pass && r.max_residual() > 0.0);

        let mut c = ex51_cert();
        c.s.gram[(0, 0)] = Q::from_i64(-1);
        c.s.gram[(1, 1)] = Q::from_i64(0);
        let r = verify_certificate(&ex51(), &Certificate::Infeasibility(c)).unwrap();
        assert!(!r.pass);
        assert!(r.min_margin() < 0.0);
    }

    #[test]
    fn float_tolerance_applies_in_float_mode() {
        let f = |m: &DMatrix<Q>| m.map(|v| v.to_f64());
        let c = ex51_cert();
        let mut fc = InfeasibilityCertificate {
            level: 1,
            s: GramSos { basis: c.s.basis.clone(), gram: f(&c.s.gram) },
            big: GramSosMatrix { size: 2, basis: c.big.basis.clone(), gram: f(&c.big.gram) },
            residual: 0.0,
        };
        fc.big.gram[(0, 0)] += 1e-8;
        let a = ex51().to_float();
        assert!(verify_certificate(&a, &Certificate::Infeasibility(fc.clone())).unwrap().pass);
        fc.big.gram[(0, 0)] += 1e-4;
        assert!(!verify_certificate(&a, &Certificate::Infeasibility(fc)).unwrap().pass);
    }

    #[test]
    fn mismatched_shapes_are_malformed() {
        let mut c = ex51_cert();
        c.big = GramSosMatrix::from_vectors(1, 1, 1, &[vec![Polynomial::parse("1", 1).unwrap()]]).unwrap();
        assert!(verify_certificate(&ex51(), &Certificate::Infeasibility(c)).is_err());
    }

    #[test]
    fn rationalize_recovers_the_exact_certificate() {
        let c = ex51_cert();
        let noisy = InfeasibilityCertificate {
            level: 1,
            s: GramSos { basis: c.s.basis.clone(), gram: c.s.gram.map(|v| v.to_f64() + 1e-10) },
            big: GramSosMatrix {
                size: 2,
                basis: c.big.basis.clone(),
                gram: c.big.gram.map(|v| v.to_f64() - 1e-10),
            },
            residual: 1e-10,
        };
        let exact = rationalize(&ex51(), &Certificate::Infeasibility(noisy), 1000).unwrap();
        let r = verify_certificate(&ex51(), &exact).unwrap();
        assert!(r.pass && r.max_residual() == 0.0);
    }

    #[test]
    fn eps_membership_rejects_bad_arguments() {
        let a = ex51().to_float();
        let s = &Settings::default();
        let x = Polynomial::parse("x1", 1).unwrap();
        assert!(check_eps_membership(&a, &x, -1.0, 0, s).is_err());
        assert!(check_eps_membership(&a, &x, f64::NAN, 0, s).is_err());
        assert!(check_eps_membership(&a, &Polynomial::parse("x1^2", 1).unwrap(), 0.0, 0, s).is_err());
    }
}
