//! Dense linear algebra shared by the exact and float code paths.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::scalar::Scalar;

pub fn mat_mul<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    assert_eq!(a.ncols(), b.nrows(), "matrix product dimension mismatch");
    let mut out = DMatrix::from_element(a.nrows(), b.ncols(), T::zero());
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            let aik = &a[(i, k)];
            if aik.is_zero() {
                continue;
            }
            for j in 0..b.ncols() {
                let v = aik.clone() * b[(k, j)].clone();
                out[(i, j)] = out[(i, j)].clone() + v;
            }
        }
    }
    out
}

pub fn transpose<T: Scalar>(a: &DMatrix<T>) -> DMatrix<T> {
    DMatrix::from_fn(a.ncols(), a.nrows(), |i, j| a[(j, i)].clone())
}

/// `Q^T A Q`.
pub fn congruent<T: Scalar>(a: &DMatrix<T>, q: &DMatrix<T>) -> DMatrix<T> {
    mat_mul(&transpose(q), &mat_mul(a, q))
}

pub fn identity<T: Scalar>(n: usize) -> DMatrix<T> {
    DMatrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
}

pub fn zeros<T: Scalar>(r: usize, c: usize) -> DMatrix<T> {
    DMatrix::from_element(r, c, T::zero())
}

pub fn max_abs<T: Scalar>(a: &DMatrix<T>) -> f64 {
    a.iter().map(Scalar::magnitude).fold(0.0, f64::max)
}

pub fn is_symmetric<T: Scalar>(a: &DMatrix<T>) -> bool {
    a.is_square() && (0..a.nrows()).all(|i| (0..i).all(|j| a[(i, j)] == a[(j, i)]))
}

/// `(A + A^T) / 2` together with the largest entry changed.
pub fn symmetrize<T: Scalar>(a: &DMatrix<T>) -> (DMatrix<T>, f64) {
    let n = a.nrows();
    let mut out = a.clone();
    let mut correction: f64 = 0.0;
    for i in 0..n {
        for j in 0..i {
            if a[(i, j)] != a[(j, i)] {
                let avg = (a[(i, j)].clone() + a[(j, i)].clone()) * T::half();
                correction = correction.max((avg.clone() - a[(i, j)].clone()).magnitude());
                out[(i, j)] = avg.clone();
                out[(j, i)] = avg;
            }
        }
    }
    (out, correction)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant<T: Scalar>(a: &DMatrix<T>) -> T {
    assert!(a.is_square());
    let n = a.nrows();
    let mut m = a.clone();
    let mut det = T::one();
    for col in 0..n {
        let pivot = if T::EXACT {
            (col..n).find(|&r| !m[(r, col)].is_zero())
        } else {
            (col..n)
                .filter(|&r| !m[(r, col)].is_zero())
                .max_by(|&x, &y| m[(x, col)].magnitude().total_cmp(&m[(y, col)].magnitude()))
        };
        let Some(p) = pivot else { return T::zero() };
        if p != col {
            m.swap_rows(p, col);
            det = -det;
        }
        let d = m[(col, col)].clone();
        det = det * d.clone();
        for r in col + 1..n {
            if m[(r, col)].is_zero() {
                continue;
            }
            let f = m[(r, col)].clone() / d.clone();
            for c in col..n {
                let v = f.clone() * m[(col, c)].clone();
                m[(r, c)] = m[(r, c)].clone() - v;
            }
        }
    }
    det
}

/// Inverse by Gauss-Jordan elimination; `None` when singular.
pub fn inverse<T: Scalar>(a: &DMatrix<T>) -> Option<DMatrix<T>> {
    assert!(a.is_square());
    let n = a.nrows();
    let mut m = a.clone();
    let mut inv = identity::<T>(n);
    let scale = max_abs(a);
    for col in 0..n {
        let p = (col..n)
            .filter(|&r| !m[(r, col)].is_negligible(scale))
            .max_by(|&x, &y| m[(x, col)].magnitude().total_cmp(&m[(y, col)].magnitude()))?;
        m.swap_rows(p, col);
        inv.swap_rows(p, col);
        let d = T::one() / m[(col, col)].clone();
        for c in 0..n {
            m[(col, c)] = m[(col, c)].clone() * d.clone();
            inv[(col, c)] = inv[(col, c)].clone() * d.clone();
        }
        for r in 0..n {
            if r == col || m[(r, col)].is_zero() {
                continue;
            }
            let f = m[(r, col)].clone();
            for c in 0..n {
                let v = f.clone() * m[(col, c)].clone();
                m[(r, c)] = m[(r, c)].clone() - v;
                let w = f.clone() * inv[(col, c)].clone();
                inv[(r, c)] = inv[(r, c)].clone() - w;
            }
        }
    }
    Some(inv)
}

/// Outcome of a positive-semidefiniteness test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdCheck {
    pub is_psd: bool,
    /// Smallest eigenvalue (float mode) or smallest pivot of the LDL sweep (exact mode).
    pub margin: f64,
}

/// Symmetric LDL^T with diagonal pivoting. The matrix is PSD iff the sweep
/// never meets a negative pivot, or a zero pivot with a nonzero column.
/// Exact for rationals.
pub fn ldl_psd<T: Scalar>(a: &DMatrix<T>) -> PsdCheck {
    assert!(a.is_square());
    let n = a.nrows();
    let mut m = a.clone();
    let mut active: Vec<usize> = (0..n).collect();
    let mut min_pivot = f64::INFINITY;
    while !active.is_empty() {
        let (pos, &piv) = active
            .iter()
            .enumerate()
            .max_by(|x, y| m[(*x.1, *x.1)].partial_cmp(&m[(*y.1, *y.1)]).unwrap())
            .unwrap();
        let d = m[(piv, piv)].clone();
        if d < T::zero() {
            return PsdCheck {
                is_psd: false,
                margin: d.to_f64(),
            };
        }
        if d.is_zero() {
            // Remaining diagonal is zero: the rest must vanish entirely.
            let all_zero = active
                .iter()
                .all(|&i| active.iter().all(|&j| m[(i, j)].is_zero()));
            return PsdCheck {
                is_psd: all_zero,
                margin: if all_zero { 0.0 } else { -1.0 },
            };
        }
        min_pivot = min_pivot.min(d.to_f64());
        active.remove(pos);
        for &i in &active {
            if m[(i, piv)].is_zero() {
                continue;
            }
            let f = m[(i, piv)].clone() / d.clone();
            for &j in &active {
                let v = f.clone() * m[(piv, j)].clone();
                m[(i, j)] = m[(i, j)].clone() - v;
            }
        }
    }
    PsdCheck {
        is_psd: true,
        margin: if n == 0 { 0.0 } else { min_pivot },
    }
}

/// Eigenvalue test with tolerance: PSD iff the smallest eigenvalue is at least `-tol`.
pub fn eigen_psd(a: &DMatrix<f64>, tol: f64) -> PsdCheck {
    let margin = min_eigenvalue(a);
    PsdCheck {
        is_psd: margin >= -tol,
        margin,
    }
}

pub fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(a.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Solves a consistent linear system `A x = b` by reduced row echelon form,
/// setting free variables to zero. Returns `None` when inconsistent.
pub fn solve_consistent<T: Scalar>(a: &[Vec<T>], b: &[T], ncols: usize) -> Option<Vec<T>> {
    let m = a.len();
    let mut rows: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(r, v)| {
            let mut row = r.clone();
            row.push(v.clone());
            row
        })
        .collect();
    let scale = rows
        .iter()
        .flat_map(|r| r.iter())
        .map(Scalar::magnitude)
        .fold(0.0, f64::max);
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..ncols {
        if next == m {
            break;
        }
        let pick = if T::EXACT {
            (next..m).find(|&r| !rows[r][col].is_zero())
        } else {
            (next..m)
                .filter(|&r| !rows[r][col].is_negligible(scale))
                .max_by(|&x, &y| rows[x][col].magnitude().total_cmp(&rows[y][col].magnitude()))
        };
        let Some(p) = pick else { continue };
        rows.swap(next, p);
        let inv = T::one() / rows[next][col].clone();
        for v in rows[next].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        let pivot_row = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == next || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (c, v) in row.iter_mut().enumerate() {
                if !pivot_row[c].is_zero() {
                    *v = v.clone() - f.clone() * pivot_row[c].clone();
                }
            }
        }
        pivots.push(col);
        next += 1;
    }
    if rows[next..].iter().any(|r| !r[ncols].is_negligible(scale)) {
        return None;
    }
    let mut x = vec![T::zero(); ncols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = rows[r][ncols].clone();
    }
    Some(x)
}

/// Factor `W` (rank x n) with `W^T W ~= U`, keeping eigenvalues above `tol`.
pub fn psd_factor_f64(u: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>, f64> {
    let n = u.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let (sym, _) = symmetrize(u);
    let eig = SymmetricEigen::new(sym);
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -tol {
        return Err(min);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&i| eig.eigenvalues[i] > tol)
        .collect();
    let mut w = DMatrix::zeros(kept.len(), n);
    for (r, &i) in kept.iter().enumerate() {
        let s = eig.eigenvalues[i].sqrt();
        for c in 0..n {
            w[(r, c)] = s * eig.eigenvectors[(c, i)];
        }
    }
    Ok(w)
}

/// Nearest PSD matrix in Frobenius norm: negative eigenvalues clipped to zero.
pub fn project_psd(a: &DMatrix<f64>) -> DMatrix<f64> {
    if a.nrows() == 0 {
        return a.clone();
    }
    let (sym, _) = symmetrize(a);
    let eig = SymmetricEigen::new(sym);
    if eig.eigenvalues.iter().all(|&v| v >= 0.0) {
        return symmetrize(a).0;
    }
    let d = eig.eigenvalues.map(|v| v.max(0.0));
    let v = &eig.eigenvectors;
    symmetrize(&(v * DMatrix::from_diagonal(&d) * v.transpose())).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn qm(rows: &[&[i64]]) -> DMatrix<Rational> {
        DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| Rational::from_i64(rows[i][j]))
    }

    #[test]
    fn exact_ldl_classifies() {
        assert!(ldl_psd(&qm(&[&[2, 1], &[1, 1]])).is_psd);
        assert!(ldl_psd(&qm(&[&[1, 1], &[1, 1]])).is_psd);
        assert!(!ldl_psd(&qm(&[&[1, 2], &[2, 1]])).is_psd);
        assert!(!ldl_psd(&qm(&[&[0, 1], &[1, 0]])).is_psd);
        assert!(ldl_psd(&qm(&[&[0, 0], &[0, 0]])).is_psd);
        assert!(!ldl_psd(&qm(&[&[1, 0], &[0, -1]])).is_psd);
        assert!(ldl_psd(&qm(&[&[4, 2, 0], &[2, 1, 0], &[0, 0, 0]])).is_psd);
    }

    #[test]
    fn determinant_and_inverse() {
        let a = qm(&[&[2, 1], &[1, 1]]);
        assert_eq!(determinant(&a), Rational::from_i64(1));
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
        assert!(inverse(&qm(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn consistent_solve() {
        let a = vec![
            vec![Rational::from_i64(1), Rational::from_i64(1)],
            vec![Rational::from_i64(2), Rational::from_i64(2)],
        ];
        let b = vec![Rational::from_i64(3), Rational::from_i64(6)];
        let x = solve_consistent(&a, &b, 2).unwrap();
        assert_eq!(x[0].clone() + x[1].clone(), Rational::from_i64(3));
        let bad = vec![Rational::from_i64(3), Rational::from_i64(7)];
        assert!(solve_consistent(&a, &bad, 2).is_none());
    }

    #[test]
    fn psd_factor_examples() {
        let w = psd_factor_f64(&DMatrix::identity(2, 2), 1e-12).unwrap();
        assert!((w.transpose() * &w - DMatrix::<f64>::identity(2, 2)).amax() < 1e-14);
        let w = psd_factor_f64(&DMatrix::zeros(3, 3), 1e-12).unwrap();
        assert_eq!(w.nrows(), 0);
        assert!(psd_factor_f64(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]), 1e-9).is_err());
    }
}
