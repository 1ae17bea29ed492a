#![allow(dead_code)]

use lmi_sos::pencil::LinearPencil;
use lmi_sos::poly::Polynomial;
use lmi_sos::scalar::{parse_rational, Rational, Scalar};
use std::path::PathBuf;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn q(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

pub fn exact(rows: &[Vec<Vec<i64>>]) -> LinearPencil<Rational> {
    let m: Vec<Vec<Vec<Rational>>> = rows
        .iter()
        .map(|m| m.iter().map(|r| r.iter().map(|&v| Rational::from_i64(v)).collect()).collect())
        .collect();
    LinearPencil::from_rows(&m).unwrap()
}

/// `[[x, 1], [1, 0]]`
pub fn ex51() -> LinearPencil<Rational> {
    exact(&[vec![vec![0, 1], vec![1, 0]], vec![vec![1, 0], vec![0, 0]]])
}

/// Rows `(0, x1, 0), (x1, x2, 1), (0, 1, x1)`.
pub fn ex52() -> LinearPencil<Rational> {
    exact(&[
        vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 0]],
        vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]],
        vec![vec![0, 0, 0], vec![0, 1, 0], vec![0, 0, 0]],
    ])
}

/// Spectrahedron `{(0, x2, 0)}` inside the hyperplane `x1 = 0`.
pub fn ex53() -> LinearPencil<Rational> {
    exact(&[
        vec![vec![0, 0, 0], vec![0, 0, 0], vec![0, 0, 0]],
        vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]],
        vec![vec![0, 0, 0], vec![0, 1, 0], vec![0, 0, 0]],
        vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 0]],
    ])
}

/// `[[1, x], [x, 0]]`, feasible only at `x = 0`.
pub fn ex41() -> LinearPencil<Rational> {
    exact(&[vec![vec![1, 0], vec![0, 0]], vec![vec![0, 1], vec![1, 0]]])
}

/// `[[alpha + x2, 0, 0], [0, x1, x2], [0, x2, 0]]`
pub fn ex54(alpha: f64) -> LinearPencil<f64> {
    let mut p = exact(&[
        vec![vec![0, 0, 0], vec![0, 0, 0], vec![0, 0, 0]],
        vec![vec![0, 0, 0], vec![0, 1, 0], vec![0, 0, 0]],
        vec![vec![1, 0, 0], vec![0, 0, 1], vec![0, 1, 0]],
    ])
    .to_float()
    .coeffs()
    .to_vec();
    p[0][(0, 0)] = alpha;
    LinearPencil::new(p).unwrap()
}

/// The pencil `[x]`.
pub fn line() -> LinearPencil<f64> {
    exact(&[vec![vec![0]], vec![vec![1]]]).to_float()
}

pub fn var(n: usize, i: usize) -> Polynomial<Rational> {
    Polynomial::var(n, i)
}

pub fn konst(n: usize, c: &str) -> Polynomial<Rational> {
    Polynomial::constant(n, q(c))
}
