//! Coefficient fields: exact rationals and binary floats.
//!
//! Every polynomial, pencil and certificate is generic over [`Scalar`]. The two
//! implementations never mix implicitly; conversions go through
//! [`Scalar::to_f64`] and [`Scalar::from_f64`] at call sites that mean it.

use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational arithmetic.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid number `{0}`")]
pub struct ParseScalarError(pub String);

/// A coefficient field usable for polynomials and dense matrices.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Num
    + Signed
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// `true` for exact arithmetic.
    const EXACT: bool;
    /// Mode label used in reports and certificate files.
    const MODE: &'static str;

    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }
    fn parse_scalar(s: &str) -> Result<Self, ParseScalarError>;
    /// Canonical text form: `p/q` for rationals, shortest round-trip decimal for floats.
    fn to_text(&self) -> String;

    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    /// Treat as zero for pivoting. Exact zero in rational mode.
    fn is_negligible(&self, scale: f64) -> bool;

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const MODE: &'static str = "float";

    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn parse_scalar(s: &str) -> Result<Self, ParseScalarError> {
        let t = s.trim();
        if let Some((p, q)) = t.split_once('/') {
            let p: f64 = p.trim().parse().map_err(|_| ParseScalarError(s.into()))?;
            let q: f64 = q.trim().parse().map_err(|_| ParseScalarError(s.into()))?;
            if q == 0.0 {
                return Err(ParseScalarError(s.into()));
            }
            return Ok(p / q);
        }
        t.parse().map_err(|_| ParseScalarError(s.into()))
    }
    fn to_text(&self) -> String {
        format!("{self:?}")
    }
    fn is_negligible(&self, scale: f64) -> bool {
        self.abs() <= 1e-12 * scale.max(1.0)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const MODE: &'static str = "exact";

    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(Zero::zero)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // Numerator and denominator too large for direct conversion.
            let n = self.numer().bits() as i64;
            let d = self.denom().bits() as i64;
            let shift = n.max(d) - 1000;
            let num = (self.numer() >> shift.max(0) as usize).to_f64().unwrap_or(f64::NAN);
            let den = (self.denom() >> shift.max(0) as usize).to_f64().unwrap_or(f64::NAN);
            num / den
        })
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn parse_scalar(s: &str) -> Result<Self, ParseScalarError> {
        parse_rational(s)
    }
    fn to_text(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
    fn is_negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }
}

/// Parses `p/q`, integers and decimal literals (with optional exponent) exactly.
pub fn parse_rational(s: &str) -> Result<Rational, ParseScalarError> {
    let err = || ParseScalarError(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = parse_rational(p)?;
        let q = parse_rational(q)?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(p / q);
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = t[pos + 1..].parse().map_err(|_| err())?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all: String = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| err())?;
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 10_000 {
        return Err(err());
    }
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Ok(value)
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued-fraction convergents and semiconvergents).
pub fn limit_denominator(x: f64, max_den: u64) -> Rational {
    let exact = Rational::from_f64(x);
    let max_den = BigInt::from(max_den.max(1));
    if exact.denom() <= &max_den {
        return exact;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (
        BigInt::zero(),
        BigInt::one(),
        BigInt::one(),
        BigInt::zero(),
    );
    let mut n = exact.numer().clone();
    let mut d = exact.denom().clone();
    loop {
        let a = num_integer::Integer::div_floor(&n, &d);
        let q2 = &q0 + &a * &q1;
        if q2 > max_den {
            break;
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let r = &n - &a * &d;
        n = std::mem::replace(&mut d, r);
        if d.is_zero() {
            break;
        }
    }
    let k = (&max_den - &q0) / &q1;
    let bound1 = BigRational::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let bound2 = BigRational::new(p1, q1);
    if (&bound2 - &exact).abs() <= (&bound1 - &exact).abs() {
        bound2
    } else {
        bound1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn parses_rational_forms() {
        assert_eq!(parse_rational("-1/2").unwrap(), q(-1, 2));
        assert_eq!(parse_rational("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_rational("1e-3").unwrap(), q(1, 1000));
        assert_eq!(parse_rational("-2.5E1").unwrap(), q(-25, 1));
        assert_eq!(parse_rational(" 7 ").unwrap(), q(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn text_round_trip() {
        for v in [q(-3, 7), q(5, 1), q(0, 1)] {
            assert_eq!(parse_rational(&v.to_text()).unwrap(), v);
        }
        let x = 0.1f64 + 0.2;
        assert_eq!(f64::parse_scalar(&x.to_text()).unwrap(), x);
    }

    #[test]
    fn limit_denominator_finds_simple_fractions() {
        assert_eq!(limit_denominator(0.5000000001, 100), q(1, 2));
        assert_eq!(limit_denominator(-0.3333333333, 1000), q(-1, 3));
        assert_eq!(limit_denominator(std::f64::consts::PI, 1000), q(355, 113));
        assert_eq!(limit_denominator(3.0, 10), q(3, 1));
    }
}
