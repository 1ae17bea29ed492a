//! Linear pencils `A(x) = A0 + x1*A1 + ... + xn*An` and symmetric matrix polynomials.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::linalg;
use crate::poly::{Monomial, Polynomial};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PencilError {
    #[error("a pencil needs at least the constant matrix")]
    Empty,
    #[error("matrix {index} is {rows}x{cols}, expected {size}x{size}")]
    BadShape {
        index: usize,
        rows: usize,
        cols: usize,
        size: usize,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("transformation matrix is singular")]
    Singular,
    #[error("matrix polynomial is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
}

/// Determinant threshold below which a float transformation counts as singular.
pub const SINGULAR_DET: f64 = 1e-10;
/// Symmetrization corrections above this size are logged.
pub const SYMMETRY_WARN: f64 = 1e-9;

/// A symmetric linear pencil of size `alpha` in `n` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPencil<T> {
    size: usize,
    coeffs: Vec<DMatrix<T>>,
}

impl<T: Scalar> LinearPencil<T> {
    /// Builds a pencil from `[A0, A1, ..., An]`, symmetrizing each matrix.
    pub fn new(coeffs: Vec<DMatrix<T>>) -> Result<Self, PencilError> {
        let size = coeffs.first().ok_or(PencilError::Empty)?.nrows();
        let mut out = Vec::with_capacity(coeffs.len());
        for (index, m) in coeffs.into_iter().enumerate() {
            if m.nrows() != size || m.ncols() != size {
                return Err(PencilError::BadShape {
                    index,
                    rows: m.nrows(),
                    cols: m.ncols(),
                    size,
                });
            }
            let (sym, correction) = linalg::symmetrize(&m);
            if (T::EXACT && correction > 0.0) || correction > SYMMETRY_WARN {
                log::warn!("pencil matrix {index} symmetrized (max correction {correction:e})");
            }
            out.push(sym);
        }
        Ok(LinearPencil { size, coeffs: out })
    }

    /// Builds a pencil from nested row-major arrays.
    pub fn from_rows(matrices: &[Vec<Vec<T>>]) -> Result<Self, PencilError> {
        let mats = matrices
            .iter()
            .enumerate()
            .map(|(index, rows)| {
                let r = rows.len();
                let c = rows.first().map_or(0, Vec::len);
                if rows.iter().any(|row| row.len() != c) {
                    return Err(PencilError::BadShape {
                        index,
                        rows: r,
                        cols: c,
                        size: r,
                    });
                }
                Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j].clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(mats)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn nvars(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `A0` for `index == 0`, otherwise the coefficient of `x_index`.
    pub fn coeff(&self, index: usize) -> &DMatrix<T> {
        &self.coeffs[index]
    }

    pub fn coeffs(&self) -> &[DMatrix<T>] {
        &self.coeffs
    }

    /// The affine-linear polynomial in entry `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> Polynomial<T> {
        let n = self.nvars();
        let lin: Vec<T> = self.coeffs[1..].iter().map(|m| m[(i, j)].clone()).collect();
        let mut p = Polynomial::linear(self.coeffs[0][(i, j)].clone(), &lin);
        if n == 0 {
            p = Polynomial::constant(0, self.coeffs[0][(i, j)].clone());
        }
        p
    }

    pub fn evaluate(&self, x: &[T]) -> Result<DMatrix<T>, PencilError> {
        if x.len() != self.nvars() {
            return Err(PencilError::DimensionMismatch {
                expected: self.nvars(),
                found: x.len(),
            });
        }
        let mut out = self.coeffs[0].clone();
        for (xi, m) in x.iter().zip(&self.coeffs[1..]) {
            if xi.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(m.iter()) {
                *o = o.clone() + xi.clone() * v.clone();
            }
        }
        Ok(out)
    }

    pub fn to_matrix_polynomial(&self) -> MatrixPolynomial<T> {
        let a = self.size;
        MatrixPolynomial {
            size: a,
            entries: (0..a * a).map(|k| self.entry(k / a, k % a)).collect(),
        }
    }

    /// The pencil with coefficients `Q^T Ai Q`.
    pub fn congruence(&self, q: &DMatrix<T>) -> Result<Self, PencilError> {
        if q.nrows() != self.size || q.ncols() != self.size {
            return Err(PencilError::DimensionMismatch {
                expected: self.size,
                found: q.nrows(),
            });
        }
        check_invertible(q)?;
        let coeffs = self.coeffs.iter().map(|m| linalg::congruent(m, q)).collect();
        Ok(LinearPencil {
            size: self.size,
            coeffs,
        })
    }

    /// The pencil `B(y) = A(T y + b)`.
    pub fn affine_change(&self, t: &DMatrix<T>, b: &[T]) -> Result<Self, PencilError> {
        let n = self.nvars();
        if t.nrows() != n || t.ncols() != n || b.len() != n {
            return Err(PencilError::DimensionMismatch {
                expected: n,
                found: t.nrows(),
            });
        }
        check_invertible(t)?;
        let mut c0 = self.coeffs[0].clone();
        for (bi, m) in b.iter().zip(&self.coeffs[1..]) {
            axpy(&mut c0, bi, m);
        }
        let mut coeffs = vec![c0];
        for j in 0..n {
            let mut cj = linalg::zeros(self.size, self.size);
            for i in 0..n {
                axpy(&mut cj, &t[(i, j)], &self.coeffs[i + 1]);
            }
            coeffs.push(cj);
        }
        Ok(LinearPencil {
            size: self.size,
            coeffs,
        })
    }

    /// `A + eps * I`.
    pub fn shifted(&self, eps: &T) -> Self {
        let mut out = self.clone();
        for i in 0..self.size {
            out.coeffs[0][(i, i)] = out.coeffs[0][(i, i)].clone() + eps.clone();
        }
        out
    }

    /// Block-diagonal direct sum of pencils in the same variables.
    pub fn direct_sum(parts: &[LinearPencil<T>]) -> Result<Self, PencilError> {
        let first = parts.first().ok_or(PencilError::Empty)?;
        let n = first.nvars();
        let total: usize = parts.iter().map(|p| p.size).sum();
        let mut coeffs = vec![linalg::zeros::<T>(total, total); n + 1];
        let mut offset = 0;
        for p in parts {
            if p.nvars() != n {
                return Err(PencilError::DimensionMismatch {
                    expected: n,
                    found: p.nvars(),
                });
            }
            for (k, m) in p.coeffs.iter().enumerate() {
                for i in 0..p.size {
                    for j in 0..p.size {
                        coeffs[k][(offset + i, offset + j)] = m[(i, j)].clone();
                    }
                }
            }
            offset += p.size;
        }
        Ok(LinearPencil {
            size: total,
            coeffs,
        })
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> LinearPencil<U> {
        LinearPencil {
            size: self.size,
            coeffs: self.coeffs.iter().map(|m| m.map(|v| f(&v))).collect(),
        }
    }

    pub fn to_float(&self) -> LinearPencil<f64> {
        self.map(|v| v.to_f64())
    }

    pub fn to_exact(&self) -> LinearPencil<Rational> {
        self.map(|v| Rational::from_f64(v.to_f64()))
    }

    /// Row-major nested arrays, one per coefficient matrix.
    pub fn to_rows(&self) -> Vec<Vec<Vec<T>>> {
        self.coeffs
            .iter()
            .map(|m| {
                (0..self.size)
                    .map(|i| (0..self.size).map(|j| m[(i, j)].clone()).collect())
                    .collect()
            })
            .collect()
    }
}

fn axpy<T: Scalar>(y: &mut DMatrix<T>, a: &T, x: &DMatrix<T>) {
    if a.is_zero() {
        return;
    }
    for (o, v) in y.iter_mut().zip(x.iter()) {
        *o = o.clone() + a.clone() * v.clone();
    }
}

fn check_invertible<T: Scalar>(m: &DMatrix<T>) -> Result<(), PencilError> {
    let det = linalg::determinant(m);
    let singular = if T::EXACT {
        det.is_zero()
    } else {
        det.magnitude() < SINGULAR_DET
    };
    if singular {
        Err(PencilError::Singular)
    } else {
        Ok(())
    }
}

/// A symmetric matrix with polynomial entries.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial<T> {
    size: usize,
    entries: Vec<Polynomial<T>>,
}

impl<T: Scalar> MatrixPolynomial<T> {
    /// Row-major entries; rejects asymmetric input.
    pub fn new(size: usize, entries: Vec<Polynomial<T>>) -> Result<Self, PencilError> {
        if entries.len() != size * size {
            return Err(PencilError::DimensionMismatch {
                expected: size * size,
                found: entries.len(),
            });
        }
        for i in 0..size {
            for j in 0..i {
                if entries[i * size + j] != entries[j * size + i] {
                    return Err(PencilError::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(MatrixPolynomial { size, entries })
    }

    pub fn zero(size: usize, nvars: usize) -> Self {
        MatrixPolynomial {
            size,
            entries: vec![Polynomial::zero(nvars); size * size],
        }
    }

    /// `u u^T` for a column vector of polynomials.
    pub fn outer(u: &[Polynomial<T>]) -> Self {
        let a = u.len();
        let entries = (0..a * a).map(|k| &u[k / a] * &u[k % a]).collect();
        MatrixPolynomial { size: a, entries }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial<T> {
        &self.entries[i * self.size + j]
    }

    pub fn entries(&self) -> &[Polynomial<T>] {
        &self.entries
    }

    pub(crate) fn from_entries_unchecked(size: usize, entries: Vec<Polynomial<T>>) -> Self {
        MatrixPolynomial { size, entries }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PencilError> {
        if self.size != other.size {
            return Err(PencilError::DimensionMismatch {
                expected: self.size,
                found: other.size,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(MatrixPolynomial {
            size: self.size,
            entries,
        })
    }

    pub fn scale(&self, c: &T) -> Self {
        MatrixPolynomial {
            size: self.size,
            entries: self.entries.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn evaluate(&self, x: &[T]) -> DMatrix<T> {
        DMatrix::from_fn(self.size, self.size, |i, j| self.get(i, j).evaluate(x))
    }

    pub fn max_degree(&self) -> usize {
        self.entries.iter().map(Polynomial::degree).max().unwrap_or(0)
    }
}

/// The polynomial `tr(A(x) S(x)) = sum_{i,j} A_ij(x) S_ji(x)`.
pub fn trace_pair<T: Scalar>(
    pencil: &LinearPencil<T>,
    s: &MatrixPolynomial<T>,
) -> Result<Polynomial<T>, PencilError> {
    if pencil.size() != s.size() {
        return Err(PencilError::DimensionMismatch {
            expected: pencil.size(),
            found: s.size(),
        });
    }
    let n = pencil.nvars();
    let mut out = Polynomial::zero(n);
    for i in 0..pencil.size() {
        for j in 0..pencil.size() {
            let sji = s.get(j, i);
            if sji.is_zero() {
                continue;
            }
            if sji.nvars() != n {
                return Err(PencilError::DimensionMismatch {
                    expected: n,
                    found: sji.nvars(),
                });
            }
            for (k, m) in pencil.coeffs().iter().enumerate() {
                let a = &m[(i, j)];
                if a.is_zero() {
                    continue;
                }
                let factor = if k == 0 {
                    Polynomial::constant(n, a.clone())
                } else {
                    Polynomial::monomial(Monomial::var(n, k - 1), a.clone())
                };
                out = &out + &(&factor * sji);
            }
        }
    }
    Ok(out)
}

/// Constant matrix as a matrix polynomial in `nvars` variables.
pub fn constant_matrix_polynomial<T: Scalar>(m: &DMatrix<T>, nvars: usize) -> MatrixPolynomial<T> {
    let a = m.nrows();
    MatrixPolynomial {
        size: a,
        entries: (0..a * a)
            .map(|k| Polynomial::constant(nvars, m[(k / a, k % a)].clone()))
            .collect(),
    }
}

/// The pencil `diag(1 - x1, 1 + x1, ..., 1 - xn, 1 + xn)` whose spectrahedron is the unit cube.
pub fn cube_pencil<T: Scalar>(nvars: usize) -> LinearPencil<T> {
    let size = 2 * nvars;
    let mut coeffs = vec![linalg::identity::<T>(size)];
    for i in 0..nvars {
        let mut m = linalg::zeros(size, size);
        m[(2 * i, 2 * i)] = -T::one();
        m[(2 * i + 1, 2 * i + 1)] = T::one();
        coeffs.push(m);
    }
    if nvars == 0 {
        coeffs = vec![linalg::identity(1)];
    }
    LinearPencil::new(coeffs).expect("cube pencil is well formed")
}
