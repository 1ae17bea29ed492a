//! Sparse multivariate polynomials over a [`Scalar`] field.
//!
//! Monomials are ordered by total degree first and then lexicographically with
//! larger exponents of earlier variables first, so the degree-`d` basis reads
//! `1, x1, ..., xn, x1^2, x1*x2, ..., xn^d`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};


use thiserror::Error;

use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("variable count mismatch: {left} vs {right}")]
    NvarsMismatch { left: usize, right: usize },
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("expected a polynomial of degree at most {max}, got degree {found}")]
    DegreeTooHigh { max: usize, found: usize },
}

/// Exponent vector of a monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    /// The monomial `x_{var+1}` (zero-based `var`).
    pub fn var(nvars: usize, var: usize) -> Self {
        let mut e = vec![0; nvars];
        e[var] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn evaluate<T: Scalar>(&self, point: &[T]) -> T {
        let mut acc = T::one();
        for (x, &e) in point.iter().zip(&self.0) {
            for _ in 0..e {
                acc = acc * x.clone();
            }
        }
        acc
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "x{}^{}", i + 1, e)?;
            }
        }
        Ok(())
    }
}

/// All monomials of degree at most `degree` in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    nvars: usize,
    degree: usize,
    monomials: Vec<Monomial>,
}

impl MonomialBasis {
    pub fn new(nvars: usize, degree: usize) -> Self {
        let mut monomials = Vec::with_capacity(basis_len(nvars, degree));
        for d in 0..=degree {
            let mut current = vec![0u32; nvars];
            push_exponents(&mut current, 0, d as u32, &mut monomials);
        }
        MonomialBasis {
            nvars,
            degree,
            monomials,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn get(&self, i: usize) -> &Monomial {
        &self.monomials[i]
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.monomials.binary_search(m).ok()
    }
}

fn push_exponents(current: &mut Vec<u32>, var: usize, remaining: u32, out: &mut Vec<Monomial>) {
    let n = current.len();
    if var == n {
        if remaining == 0 {
            out.push(Monomial(current.clone()));
        }
        return;
    }
    if var + 1 == n {
        current[var] = remaining;
        out.push(Monomial(current.clone()));
        current[var] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[var] = e;
        push_exponents(current, var + 1, remaining - e, out);
    }
    current[var] = 0;
}

/// `s(d) = C(n + d, n)`, the number of monomials of degree at most `d` in `n` variables.
pub fn basis_len(nvars: usize, degree: usize) -> usize {
    let mut acc: u128 = 1;
    for i in 1..=nvars as u128 {
        acc = acc * (degree as u128 + i) / i;
    }
    acc as usize
}

/// The ordered monomial vector of all monomials of degree at most `d`.
pub fn basis_vector(nvars: usize, degree: usize) -> MonomialBasis {
    MonomialBasis::new(nvars, degree)
}

/// A sparse polynomial in `nvars` variables. No zero coefficients are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    nvars: usize,
    terms: BTreeMap<Monomial, T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        Self::monomial(Monomial::one(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, T::one())
    }

    /// The variable `x_{var+1}`.
    pub fn var(nvars: usize, var: usize) -> Self {
        Self::monomial(Monomial::var(nvars, var), T::one())
    }

    pub fn monomial(m: Monomial, c: T) -> Self {
        let nvars = m.nvars();
        let mut p = Self::zero(nvars);
        p.add_term(m, c);
        p
    }

    /// Builds `c0 + sum_i c_i x_i`.
    pub fn linear(constant: T, coeffs: &[T]) -> Self {
        let n = coeffs.len();
        let mut p = Self::constant(n, constant);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::var(n, i), c.clone());
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, T)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial has wrong number of variables");
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn coeff(&self, m: &Monomial) -> T {
        self.terms.get(m).cloned().unwrap_or_else(T::zero)
    }

    pub fn constant_term(&self) -> T {
        self.coeff(&Monomial::one(self.nvars))
    }

    /// Adds `c * m` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check_nvars(&self, other: &Self) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::NvarsMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_nvars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_nvars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_nvars(other)?;
        let mut out = Self::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        let mut out = Self::zero(self.nvars);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn evaluate(&self, point: &[T]) -> T {
        assert_eq!(point.len(), self.nvars, "point has wrong dimension");
        self.terms
            .iter()
            .fold(T::zero(), |acc, (m, c)| acc + c.clone() * m.evaluate(point))
    }

    /// Largest coefficient magnitude, as a float. Zero for the zero polynomial.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    /// Replaces `x_{var+1}` by the polynomial `value`.
    pub fn substitute(&self, var: usize, value: &Self) -> Self {
        assert_eq!(value.nvars, self.nvars);
        let mut powers: Vec<Self> = vec![Self::one(self.nvars)];
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var] as usize;
            while powers.len() <= e {
                let next = &powers[powers.len() - 1] * value;
                powers.push(next);
            }
            let mut rest = m.clone();
            rest.0[var] = 0;
            let term = Self::monomial(rest, c.clone());
            out = &out + &(&term * &powers[e]);
        }
        out
    }

    /// For a polynomial of degree at most one: `(c0, [c1, ..., cn])`.
    pub fn linear_parts(&self) -> Result<(T, Vec<T>), PolyError> {
        if self.degree() > 1 {
            return Err(PolyError::DegreeTooHigh {
                max: 1,
                found: self.degree(),
            });
        }
        let coeffs = (0..self.nvars)
            .map(|i| self.coeff(&Monomial::var(self.nvars, i)))
            .collect();
        Ok((self.constant_term(), coeffs))
    }

    pub fn map_coeffs<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Polynomial<U> {
        Polynomial::from_terms(self.nvars, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    pub fn to_float(&self) -> Polynomial<f64> {
        self.map_coeffs(|c| c.to_f64())
    }

    /// Exact promotion of every coefficient.
    pub fn to_exact(&self) -> Polynomial<Rational> {
        self.map_coeffs(|c| Rational::from_f64(c.to_f64()))
    }

    /// Parses the text form `c * x1^a1 * ... * xn^an + ...`.
    pub fn parse(text: &str, nvars: usize) -> Result<Self, PolyError> {
        Parser::new(text, nvars).parse()
    }
}

impl<T: Scalar> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = *c < T::zero();
            let mag = c.abs();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{}", mag.to_text())?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", mag.to_text())?;
            }
        }
        Ok(())
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<T: Scalar> $trait<&Polynomial<T>> for &Polynomial<T> {
            type Output = Polynomial<T>;
            fn $method(self, rhs: &Polynomial<T>) -> Polynomial<T> {
                self.$checked(rhs).expect("polynomial arithmetic")
            }
        }
        impl<T: Scalar> $trait for Polynomial<T> {
            type Output = Polynomial<T>;
            fn $method(self, rhs: Polynomial<T>) -> Polynomial<T> {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl<T: Scalar> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        self.scale(&-T::one())
    }
}

impl<T: Scalar> Neg for Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        -&self
    }
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    nvars: usize,
    source: &'a str,
}

impl<'a> Parser<'a> {
    fn new(source: &'a str, nvars: usize) -> Self {
        let chars = source
            .char_indices()
            .filter(|(_, c)| !c.is_whitespace())
            .map(|(i, c)| (i + 1, c))
            .collect();
        Parser {
            chars,
            pos: 0,
            nvars,
            source,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn column(&self) -> usize {
        self.chars
            .get(self.pos)
            .map(|&(i, _)| i)
            .unwrap_or(self.source.len() + 1)
    }

    fn error<U>(&self, message: impl Into<String>) -> Result<U, PolyError> {
        Err(PolyError::Parse {
            column: self.column(),
            message: message.into(),
        })
    }

    fn parse<T: Scalar>(mut self) -> Result<Polynomial<T>, PolyError> {
        if self.chars.is_empty() {
            return self.error("empty polynomial");
        }
        let mut out = Polynomial::zero(self.nvars);
        let mut first = true;
        while self.peek().is_some() {
            let mut sign = T::one();
            match self.peek() {
                Some('+') => self.pos += 1,
                Some('-') => {
                    sign = -T::one();
                    self.pos += 1;
                }
                _ if first => {}
                _ => return self.error("expected `+` or `-`"),
            }
            first = false;
            let (m, c) = self.term::<T>()?;
            out.add_term(m, sign * c);
        }
        Ok(out)
    }

    fn term<T: Scalar>(&mut self) -> Result<(Monomial, T), PolyError> {
        let mut coeff = T::one();
        let mut mono = Monomial::one(self.nvars);
        let mut factors = 0;
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() || c == '.' => {
                    coeff = coeff * self.number::<T>()?;
                }
                Some('x') => {
                    let var = self.variable()?;
                    let exp = if self.peek() == Some('^') {
                        self.pos += 1;
                        self.integer()?
                    } else {
                        1
                    };
                    mono.0[var] += exp;
                }
                _ => return self.error("expected a number or a variable"),
            }
            factors += 1;
            match self.peek() {
                Some('*') => self.pos += 1,
                Some('x') => {}
                _ => break,
            }
        }
        debug_assert!(factors > 0);
        Ok((mono, coeff))
    }

    fn number<T: Scalar>(&mut self) -> Result<T, PolyError> {
        let start = self.pos;
        let mut text = String::new();
        let mut seen_slash = false;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || c == '.' {
                text.push(c);
                self.pos += 1;
            } else if (c == 'e' || c == 'E') && !seen_slash {
                // Exponent only when followed by a digit or a signed digit.
                let next = self.chars.get(self.pos + 1).map(|&(_, c)| c);
                let after = self.chars.get(self.pos + 2).map(|&(_, c)| c);
                let ok = matches!(next, Some(d) if d.is_ascii_digit())
                    || (matches!(next, Some('+') | Some('-'))
                        && matches!(after, Some(d) if d.is_ascii_digit()));
                if !ok {
                    break;
                }
                text.push(c);
                text.push(next.unwrap());
                self.pos += 2;
            } else if c == '/' && !seen_slash {
                seen_slash = true;
                text.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        T::parse_scalar(&text).or_else(|e| {
            self.pos = start;
            self.error(e.to_string())
        })
    }

    fn integer(&mut self) -> Result<u32, PolyError> {
        let mut text = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            text.push(c);
            self.pos += 1;
        }
        if text.is_empty() {
            return self.error("expected an integer");
        }
        text.parse().or_else(|_| self.error("integer out of range"))
    }

    fn variable(&mut self) -> Result<usize, PolyError> {
        self.pos += 1;
        if !self.peek().is_some_and(|c| c.is_ascii_digit()) {
            if self.nvars == 1 {
                return Ok(0);
            }
            return self.error("variables are written x1 .. xn");
        }
        let idx = self.integer()? as usize;
        if idx == 0 || idx > self.nvars {
            return self.error(format!("variable x{idx} out of range 1..={}", self.nvars));
        }
        Ok(idx - 1)
    }
}

/// Result of reducing a polynomial modulo an ideal generated by linear polynomials.
#[derive(Debug, Clone, PartialEq)]
pub enum Reduction<T> {
    /// `f = sum_i cofactors[i] * l_i + remainder`, where the remainder does not
    /// involve the `eliminated` variables (zero-based, in pivot order).
    Combination {
        cofactors: Vec<Polynomial<T>>,
        remainder: Polynomial<T>,
        eliminated: Vec<usize>,
    },
    /// `sum_i multipliers[i] * l_i = 1`: the ideal is the whole ring.
    Unit { multipliers: Vec<T> },
}

/// Division of `f` by linear generators via Gaussian elimination and successive
/// substitution of the pivot variables.
///
/// Pivoting picks the first nonzero entry in exact mode and the largest
/// magnitude in float mode.
pub fn reduce_mod_linear<T: Scalar>(
    f: &Polynomial<T>,
    generators: &[Polynomial<T>],
) -> Result<Reduction<T>, PolyError> {
    let n = f.nvars();
    let t = generators.len();
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(t);
    for (i, g) in generators.iter().enumerate() {
        f.check_nvars(g)?;
        let (c0, lin) = g.linear_parts()?;
        let mut row = lin;
        row.push(c0);
        row.extend((0..t).map(|j| if i == j { T::one() } else { T::zero() }));
        rows.push(row);
    }
    if t == 0 {
        return Ok(Reduction::Combination {
            cofactors: Vec::new(),
            remainder: f.clone(),
            eliminated: Vec::new(),
        });
    }

    let scale = rows
        .iter()
        .flat_map(|r| r[..=n].iter())
        .map(Scalar::magnitude)
        .fold(0.0, f64::max);
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..n {
        if next == t {
            break;
        }
        let candidates = next..t;
        let pick = if T::EXACT {
            candidates.clone().find(|&r| !rows[r][col].is_zero())
        } else {
            candidates
                .clone()
                .filter(|&r| !rows[r][col].is_negligible(scale))
                .max_by(|&a, &b| {
                    rows[a][col]
                        .magnitude()
                        .partial_cmp(&rows[b][col].magnitude())
                        .unwrap_or(Ordering::Equal)
                })
        };
        let Some(p) = pick else { continue };
        rows.swap(next, p);
        let inv = T::one() / rows[next][col].clone();
        for v in rows[next].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for r in 0..t {
            if r == next || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone();
            for c in 0..rows[r].len() {
                let delta = factor.clone() * rows[next][c].clone();
                rows[r][c] = rows[r][c].clone() - delta;
            }
            rows[r][col] = T::zero();
        }
        pivots.push(col);
        next += 1;
    }

    // Rows past the rank have a (numerically) vanishing linear part.
    for row in rows.iter().skip(next) {
        let c = &row[n];
        if !c.is_negligible(scale) {
            let inv = T::one() / c.clone();
            let multipliers = row[n + 1..].iter().map(|v| v.clone() * inv.clone()).collect();
            return Ok(Reduction::Unit { multipliers });
        }
    }

    // Row j reads x_{p_j} - l'_j with l'_j free of every pivot variable.
    let mut current = f.clone();
    let mut row_cofactors = Vec::with_capacity(pivots.len());
    for (j, &p) in pivots.iter().enumerate() {
        let mut rest_coeffs: Vec<T> = rows[j][..n].iter().map(|v| -v.clone()).collect();
        rest_coeffs[p] = T::zero();
        let replacement = Polynomial::linear(-rows[j][n].clone(), &rest_coeffs);
        let mut cofactor = Polynomial::zero(n);
        let mut powers = vec![Polynomial::one(n)];
        for (m, c) in current.terms() {
            let e = m.0[p] as usize;
            if e == 0 {
                continue;
            }
            while powers.len() < e {
                let nxt = &powers[powers.len() - 1] * &replacement;
                powers.push(nxt);
            }
            let xp = Polynomial::var(n, p);
            let mut sum = Polynomial::zero(n);
            let mut xp_pow = Polynomial::one(n);
            for i in 0..e {
                sum = &sum + &(&xp_pow * &powers[e - 1 - i]);
                xp_pow = &xp_pow * &xp;
            }
            let mut rest = m.clone();
            rest.0[p] = 0;
            cofactor = &cofactor + &(&Polynomial::monomial(rest, c.clone()) * &sum);
        }
        current = current.substitute(p, &replacement);
        row_cofactors.push(cofactor);
    }

    let mut cofactors = vec![Polynomial::zero(n); t];
    for (j, q) in row_cofactors.iter().enumerate() {
        for (i, cof) in cofactors.iter_mut().enumerate() {
            let w = &rows[j][n + 1 + i];
            if !w.is_zero() {
                *cof = &*cof + &q.scale(w);
            }
        }
    }
    Ok(Reduction::Combination {
        cofactors,
        remainder: current,
        eliminated: pivots,
    })
}
