//! Gram-matrix encodings of sums of squares and sos-matrices, and the SDPs that
//! decide membership in a truncated quadratic module of a pencil.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::linalg;
use crate::pencil::{trace_pair, LinearPencil, MatrixPolynomial};
use crate::poly::{Monomial, MonomialBasis, Polynomial};
use crate::scalar::{Rational, Scalar};
use crate::sdp::{self, Functional, SdpError, SdpProblem, SdpSolution, SdpStatus, Sense, Settings};

/// PSD slack tolerated for float Gram matrices.
pub const GRAM_PSD_TOL: f64 = 1e-8;
/// Largest coefficient residual accepted for a float membership identity.
pub const MEMBERSHIP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GramError {
    #[error("target has degree {degree}, above 2k+1 = {limit}")]
    DegreeTooHigh { degree: usize, limit: usize },
    #[error("variable count mismatch: pencil has {pencil}, target has {target}")]
    NvarsMismatch { pencil: usize, target: usize },
    #[error("Gram matrix is {rows}x{cols}, expected {expected}x{expected}")]
    BadShape {
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("factor has degree {found} above the basis degree {max}")]
    FactorDegree { max: usize, found: usize },
    #[error(transparent)]
    Sdp(#[from] SdpError),
}

/// `vec_k^T G vec_k`, a sum of squares when `G` is PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSos<T> {
    pub basis: MonomialBasis,
    pub gram: DMatrix<T>,
}

impl<T: Scalar> GramSos<T> {
    pub fn new(basis: MonomialBasis, gram: DMatrix<T>) -> Result<Self, GramError> {
        let n = basis.len();
        if gram.nrows() != n || gram.ncols() != n {
            return Err(GramError::BadShape {
                rows: gram.nrows(),
                cols: gram.ncols(),
                expected: n,
            });
        }
        Ok(GramSos { basis, gram })
    }

    pub fn zero(nvars: usize, degree: usize) -> Self {
        let basis = MonomialBasis::new(nvars, degree);
        let n = basis.len();
        GramSos {
            basis,
            gram: linalg::zeros(n, n),
        }
    }

    /// Gram matrix of `sum p_i^2`.
    pub fn from_factors(nvars: usize, degree: usize, factors: &[Polynomial<T>]) -> Result<Self, GramError> {
        let basis = MonomialBasis::new(nvars, degree);
        let vecs = factors
            .iter()
            .map(|p| coefficient_vector(&basis, std::slice::from_ref(p)))
            .collect::<Result<Vec<_>, _>>()?;
        let gram = sum_outer(&vecs, basis.len());
        Ok(GramSos { basis, gram })
    }

    pub fn expand(&self) -> Polynomial<T> {
        let b = &self.basis;
        let mut out = Polynomial::zero(b.nvars());
        for i in 0..b.len() {
            for j in 0..b.len() {
                let g = &self.gram[(i, j)];
                if !g.is_zero() {
                    out.add_term(b.get(i).mul(b.get(j)), g.clone());
                }
            }
        }
        out
    }

    pub fn to_float(&self) -> GramSos<f64> {
        GramSos {
            basis: self.basis.clone(),
            gram: self.gram.map(|v| v.to_f64()),
        }
    }

    pub fn to_exact(&self) -> GramSos<Rational> {
        GramSos {
            basis: self.basis.clone(),
            gram: self.gram.map(|v| Rational::from_f64(v.to_f64())),
        }
    }
}

/// `S(x) = (vec_k (x) I)^T G (vec_k (x) I)` with rows and columns of `G` indexed by
/// `(monomial a, matrix row r) -> a * size + r`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSosMatrix<T> {
    pub size: usize,
    pub basis: MonomialBasis,
    pub gram: DMatrix<T>,
}

impl<T: Scalar> GramSosMatrix<T> {
    pub fn new(size: usize, basis: MonomialBasis, gram: DMatrix<T>) -> Result<Self, GramError> {
        let n = size * basis.len();
        if gram.nrows() != n || gram.ncols() != n {
            return Err(GramError::BadShape {
                rows: gram.nrows(),
                cols: gram.ncols(),
                expected: n,
            });
        }
        Ok(GramSosMatrix { size, basis, gram })
    }

    pub fn zero(size: usize, nvars: usize, degree: usize) -> Self {
        let basis = MonomialBasis::new(nvars, degree);
        let n = size * basis.len();
        GramSosMatrix {
            size,
            basis,
            gram: linalg::zeros(n, n),
        }
    }

    /// Gram matrix of `sum u_j u_j^T` for polynomial column vectors `u_j`.
    pub fn from_vectors(
        size: usize,
        nvars: usize,
        degree: usize,
        vectors: &[Vec<Polynomial<T>>],
    ) -> Result<Self, GramError> {
        let basis = MonomialBasis::new(nvars, degree);
        let vecs = vectors
            .iter()
            .map(|u| {
                if u.len() != size {
                    return Err(GramError::BadShape {
                        rows: u.len(),
                        cols: 1,
                        expected: size,
                    });
                }
                coefficient_vector(&basis, u)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let gram = sum_outer(&vecs, size * basis.len());
        Ok(GramSosMatrix { size, basis, gram })
    }

    pub fn expand(&self) -> MatrixPolynomial<T> {
        let a = self.size;
        let b = &self.basis;
        let nvars = b.nvars();
        let mut entries = vec![Polynomial::zero(nvars); a * a];
        for i in 0..b.len() {
            for j in 0..b.len() {
                let m = b.get(i).mul(b.get(j));
                for r in 0..a {
                    for c in 0..a {
                        let g = &self.gram[(i * a + r, j * a + c)];
                        if !g.is_zero() {
                            entries[r * a + c].add_term(m.clone(), g.clone());
                        }
                    }
                }
            }
        }
        MatrixPolynomial::from_entries_unchecked(a, entries)
    }

    pub fn to_float(&self) -> GramSosMatrix<f64> {
        GramSosMatrix {
            size: self.size,
            basis: self.basis.clone(),
            gram: self.gram.map(|v| v.to_f64()),
        }
    }

    pub fn to_exact(&self) -> GramSosMatrix<Rational> {
        GramSosMatrix {
            size: self.size,
            basis: self.basis.clone(),
            gram: self.gram.map(|v| Rational::from_f64(v.to_f64())),
        }
    }
}

/// Coefficients of a polynomial vector on `basis`, indexed `a * len(u) + r`.
fn coefficient_vector<T: Scalar>(basis: &MonomialBasis, u: &[Polynomial<T>]) -> Result<Vec<T>, GramError> {
    let a = u.len();
    let mut c = vec![T::zero(); a * basis.len()];
    for (r, p) in u.iter().enumerate() {
        for (m, v) in p.terms() {
            let idx = basis.index_of(m).ok_or(GramError::FactorDegree {
                max: basis.degree(),
                found: m.degree(),
            })?;
            c[idx * a + r] = v.clone();
        }
    }
    Ok(c)
}

fn sum_outer<T: Scalar>(vecs: &[Vec<T>], n: usize) -> DMatrix<T> {
    let mut g = linalg::zeros::<T>(n, n);
    for v in vecs {
        for i in 0..n {
            if v[i].is_zero() {
                continue;
            }
            for j in 0..n {
                g[(i, j)] = g[(i, j)].clone() + v[i].clone() * v[j].clone();
            }
        }
    }
    g
}

/// The query `target in M_A^(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipProblem<T> {
    pub pencil: LinearPencil<T>,
    pub target: Polynomial<T>,
    pub level: usize,
}

/// Where the Gram blocks of a membership SDP live.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipLayout {
    pub sos_block: usize,
    pub matrix_block: usize,
    pub basis: MonomialBasis,
    pub size: usize,
    /// The monomials whose coefficients are matched, one constraint each.
    pub support: MonomialBasis,
}

impl MembershipLayout {
    pub fn extract(&self, sol: &SdpSolution) -> (GramSos<f64>, GramSosMatrix<f64>) {
        self.extract_blocks(&sol.x)
    }

    pub fn extract_blocks(&self, x: &[DMatrix<f64>]) -> (GramSos<f64>, GramSosMatrix<f64>) {
        let s = GramSos {
            basis: self.basis.clone(),
            gram: linalg::symmetrize(&x[self.sos_block]).0,
        };
        let big = GramSosMatrix {
            size: self.size,
            basis: self.basis.clone(),
            gram: linalg::symmetrize(&x[self.matrix_block]).0,
        };
        (s, big)
    }
}

/// Adds to `rows` the coefficient functionals of `tr(A S)` where `S` is the Gram
/// sos-matrix on `block` over `basis`. `rows` is indexed by `support`.
pub fn add_trace_pair_terms<T: Scalar>(
    rows: &mut [Functional],
    support: &MonomialBasis,
    pencil: &LinearPencil<T>,
    block: usize,
    basis: &MonomialBasis,
    scale: f64,
) {
    let a = pencil.size();
    let n = pencil.nvars();
    let coeffs: Vec<Vec<(usize, usize, f64)>> = pencil
        .coeffs()
        .iter()
        .map(|m| {
            let mut nz = Vec::new();
            for r in 0..a {
                for c in 0..a {
                    let v = m[(r, c)].to_f64();
                    if v != 0.0 {
                        nz.push((r, c, v));
                    }
                }
            }
            nz
        })
        .collect();
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            let mij = basis.get(i).mul(basis.get(j));
            for (k, nz) in coeffs.iter().enumerate() {
                if nz.is_empty() {
                    continue;
                }
                let m = if k == 0 { mij.clone() } else { mij.mul(&Monomial::var(n, k - 1)) };
                let Some(row) = support.index_of(&m) else { continue };
                for &(r, c, v) in nz {
                    rows[row].add_term(block, i * a + c, j * a + r, scale * v);
                }
            }
        }
    }
}

/// Adds the coefficient functionals of `vec^T G vec` for the Gram block `block`.
pub fn add_sos_terms(rows: &mut [Functional], support: &MonomialBasis, block: usize, basis: &MonomialBasis, scale: f64) {
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            let m = basis.get(i).mul(basis.get(j));
            if let Some(row) = support.index_of(&m) {
                rows[row].add_term(block, i, j, scale);
            }
        }
    }
}

/// Builds the SDP `target = s + tr(A S)` with `s`, `S` Gram blocks of degree `level`,
/// minimizing the total trace of both blocks.
pub fn assemble_membership_sdp<T: Scalar>(
    m: &MembershipProblem<T>,
) -> Result<(SdpProblem, MembershipLayout), GramError> {
    let n = m.pencil.nvars();
    if m.target.nvars() != n {
        return Err(GramError::NvarsMismatch {
            pencil: n,
            target: m.target.nvars(),
        });
    }
    let limit = 2 * m.level + 1;
    if m.target.degree() > limit {
        return Err(GramError::DegreeTooHigh {
            degree: m.target.degree(),
            limit,
        });
    }
    let basis = MonomialBasis::new(n, m.level);
    let support = MonomialBasis::new(n, limit);
    let a = m.pencil.size();
    let mut p = SdpProblem::new(vec![basis.len(), a * basis.len()], Sense::Minimize);
    let mut rows = vec![Functional::new(); support.len()];
    add_sos_terms(&mut rows, &support, 0, &basis, 1.0);
    add_trace_pair_terms(&mut rows, &support, &m.pencil, 1, &basis, 1.0);
    for (row, mono) in rows.into_iter().zip(support.monomials()) {
        p.add_constraint(row, m.target.coeff(mono).to_f64());
    }
    for i in 0..basis.len() {
        p.objective.add_term(0, i, i, 1.0);
    }
    for i in 0..a * basis.len() {
        p.objective.add_term(1, i, i, 1.0);
    }
    let layout = MembershipLayout {
        sos_block: 0,
        matrix_block: 1,
        basis,
        size: a,
        support,
    };
    Ok((p, layout))
}

/// Result of a numerical membership search.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipOutcome {
    pub status: SdpStatus,
    /// Gram data whose identity residual is within [`MEMBERSHIP_TOL`].
    pub found: Option<(GramSos<f64>, GramSosMatrix<f64>)>,
    /// Max coefficient of `s + tr(A S) - target` for the best point, infinite when
    /// the SDP was reported infeasible.
    pub residual: f64,
}

impl MembershipOutcome {
    pub fn is_member(&self) -> bool {
        self.found.is_some()
    }
}

/// Solves the membership SDP and keeps the answer only when the expanded identity
/// holds to [`MEMBERSHIP_TOL`] relative to the size of the Gram data.
pub fn solve_membership(m: &MembershipProblem<f64>, settings: &Settings) -> Result<MembershipOutcome, GramError> {
    // tr((cA) S') = tr(A (c S')), so a power-of-two rescaling of the pencil changes
    // nothing exactly but keeps the SDP data near unit size.
    let norm = m.pencil.coeffs().iter().map(linalg::max_abs).fold(0.0, f64::max);
    let c = if norm > 0.0 { (-norm.log2().round()).exp2() } else { 1.0 };
    let scaled = MembershipProblem {
        pencil: m.pencil.map(|v| v * c),
        target: m.target.clone(),
        level: m.level,
    };
    let (p, layout) = assemble_membership_sdp(&scaled)?;
    let res = sdp::solve_feasibility(&p, settings)?;
    if res.infeasible() {
        return Ok(MembershipOutcome {
            status: res.status,
            found: None,
            residual: f64::INFINITY,
        });
    }
    let x = sdp::polish_on_face(&p, &res.x).unwrap_or(res.x);
    let (s, mut big) = layout.extract_blocks(&x);
    big.gram *= c;
    let residual = membership_residual(&m.pencil, &m.target, &s, &big).max_abs_coeff();
    // Weakly infeasible pencils admit near-identities whose residual shrinks only as
    // the Gram norm blows up, down to fits of the round-off in the data. Weighting
    // the residual, floored at machine precision, by the norm rejects them.
    let norm = linalg::max_abs(&s.gram).max(linalg::max_abs(&big.gram)).max(1.0);
    let trusted = residual.max(f64::EPSILON * norm);
    log::debug!(
        "membership level {}: {} residual {:.2e} trace {:.2e}",
        m.level,
        res.status.label(),
        residual,
        res.trace
    );
    Ok(MembershipOutcome {
        status: res.status,
        found: (trusted * norm <= MEMBERSHIP_TOL).then_some((s, big)),
        residual,
    })
}

/// `s + tr(A S) - target`, the residual polynomial of a membership identity.
pub fn membership_residual<T: Scalar>(
    pencil: &LinearPencil<T>,
    target: &Polynomial<T>,
    s: &GramSos<T>,
    big: &GramSosMatrix<T>,
) -> Polynomial<T> {
    let tr = trace_pair(pencil, &big.expand()).expect("sizes checked by the caller");
    &(&s.expand() + &tr) - target
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::{solve, SdpStatus, Settings};

    type Q = Rational;

    fn p(s: &str, n: usize) -> Polynomial<Q> {
        Polynomial::parse(s, n).unwrap()
    }

    fn qm(rows: &[&[i64]]) -> DMatrix<Q> {
        DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| Q::from_i64(rows[i][j]))
    }

    fn ex51() -> LinearPencil<Q> {
        LinearPencil::new(vec![qm(&[&[0, 1], &[1, 0]]), qm(&[&[1, 0], &[0, 0]])]).unwrap()
    }

    #[test]
    fn expand_sos_examples() {
        let g = GramSos::new(MonomialBasis::new(1, 1), qm(&[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(g.expand(), p("1 + x1^2", 1));
        assert!(GramSos::<Q>::zero(2, 2).expand().is_zero());
        let f = GramSos::from_factors(1, 1, &[p("1 + x1", 1)]).unwrap();
        assert_eq!(f.expand(), p("1 + 2*x1 + x1^2", 1));
    }

    #[test]
    fn expand_sos_matrix_examples() {
        let id = GramSosMatrix::new(2, MonomialBasis::new(1, 0), qm(&[&[1, 0], &[0, 1]])).unwrap();
        let e = id.expand();
        assert_eq!(e.get(0, 0), &p("1", 1));
        assert!(e.get(0, 1).is_zero());
        let u = vec![p("1", 1), p("-1 - 1/2*x1", 1)];
        let g = GramSosMatrix::from_vectors(2, 1, 1, std::slice::from_ref(&u)).unwrap();
        assert_eq!(g.expand(), MatrixPolynomial::outer(&u));
        assert_eq!(
            trace_pair(&ex51(), &g.expand()).unwrap(),
            p("-2", 1)
        );
    }

    #[test]
    fn constraint_count_is_support_size() {
        let m = MembershipProblem {
            pencil: ex51(),
            target: p("-1", 1),
            level: 1,
        };
        let (sdp, layout) = assemble_membership_sdp(&m).unwrap();
        assert_eq!(sdp.num_constraints(), 4);
        assert_eq!(layout.support.len(), 4);
        assert_eq!(sdp.blocks, vec![2, 4]);
        let high = MembershipProblem {
            level: 0,
            target: p("x1^2", 1),
            ..m
        };
        assert!(matches!(
            assemble_membership_sdp(&high),
            Err(GramError::DegreeTooHigh { .. })
        ));
    }

    #[test]
    fn trivial_membership_is_found() {
        let m = MembershipProblem {
            pencil: LinearPencil::new(vec![qm(&[&[-1]])]).unwrap(),
            target: p("-1", 0),
            level: 0,
        };
        let (sdp, layout) = assemble_membership_sdp(&m).unwrap();
        let sol = solve(&sdp, &Settings::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        let (s, big) = layout.extract(&sol);
        assert!(s.gram[(0, 0)].abs() < 1e-7);
        assert!((big.gram[(0, 0)] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn exact_certificate_for_first_example() {
        let u = vec![p("1", 1), p("-1 - 1/2*x1", 1)];
        let mut big = GramSosMatrix::from_vectors(2, 1, 1, &[u]).unwrap();
        big.gram = big.gram.map(|v| v * Q::half());
        let s = GramSos::zero(1, 1);
        let r = membership_residual(&ex51(), &p("-1", 1), &s, &big);
        assert!(r.is_zero());
    }
}
