//! Scalar fields used throughout the crate.
//!
//! Two modes are supported: exact rationals (arbitrary precision numerator and
//! denominator) for combinatorial and linear-algebraic verdicts, and `f64` for
//! flows and optimizers. Conversions between the two are always explicit.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Default tolerance for rank and nullspace decisions in float mode.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Field operations plus the handful of mode-specific decisions the
/// algorithms need (zero tests, nullspaces, eigenvalue candidates).
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `true` for rationals; every comparison is then exact and `tol` is ignored.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn ratio(num: i64, den: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    /// Nearest representable value (binary-exact for rationals).
    fn from_f64_lossy(v: f64) -> Self;
    /// Exact rational value (binary-exact for floats).
    fn to_rational(&self) -> Rational;
    fn abs_val(&self) -> Self;

    /// Square root when it exists in the field (always for `x >= 0` floats,
    /// only perfect squares for rationals).
    fn sqrt_exact(&self) -> Option<Self>;

    /// Zero test. Exact for rationals, `|x| <= tol` for floats.
    fn is_negligible(&self, tol: f64) -> bool;

    /// Basis of `{x : m x = 0}`.
    fn nullspace(m: &Matrix<Self>, tol: f64) -> Vec<Vec<Self>>;

    /// Distinct real eigenvalues of a square matrix. Fails when some
    /// eigenvalue is not real (or, in exact mode, not rational).
    fn real_eigenvalues(m: &Matrix<Self>, tol: f64) -> Result<Vec<Self>>;

    /// Parse a decimal string (`"-0.25"`, `"3"`, `"1e-3"`) or a ratio `"p/q"`.
    fn parse_scalar(s: &str) -> Result<Self>;

    fn is_positive_tol(&self, tol: f64) -> bool {
        !self.is_negligible(tol) && *self > Self::zero()
    }

    fn is_negative_tol(&self, tol: f64) -> bool {
        !self.is_negligible(tol) && *self < Self::zero()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64_lossy(v: f64) -> Self {
        v
    }

    fn to_rational(&self) -> Rational {
        Rational::from_float(*self).expect("finite float")
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn sqrt_exact(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }

    fn is_negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    fn nullspace(m: &Matrix<Self>, tol: f64) -> Vec<Vec<Self>> {
        linalg::float_nullspace(m, tol)
    }

    fn real_eigenvalues(m: &Matrix<Self>, tol: f64) -> Result<Vec<Self>> {
        linalg::float_real_eigenvalues(m, tol)
    }

    fn parse_scalar(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains('/') {
            return Ok(rational_to_f64(&parse_rational(s)?));
        }
        s.parse::<f64>()
            .map_err(|_| Error::Parse(format!("invalid number {s:?}")))
            .and_then(|v| {
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Parse(format!("non-finite number {s:?}")))
                }
            })
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn from_f64_lossy(v: f64) -> Self {
        Rational::from_float(v).unwrap_or_else(Rational::zero)
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn sqrt_exact(&self) -> Option<Self> {
        rational_sqrt(self)
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn nullspace(m: &Matrix<Self>, _tol: f64) -> Vec<Vec<Self>> {
        linalg::bareiss_nullspace(m)
    }

    fn real_eigenvalues(m: &Matrix<Self>, _tol: f64) -> Result<Vec<Self>> {
        linalg::rational_eigenvalues(m)
    }

    fn parse_scalar(s: &str) -> Result<Self> {
        parse_rational(s)
    }
}

fn rational_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Huge numerators/denominators: shift both down before dividing.
            let bits = r.numer().bits().max(r.denom().bits()) as i64 - 900;
            let shift = bits.max(0) as usize;
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
            n / d
        }
    }
}

/// Parse `"p/q"`, an integer, or a finite decimal (optionally with exponent)
/// into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(p) => (&s[..p], s[p + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("0{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// returned only if it lies within `tol` of `x`. Uses continued-fraction
/// convergents and returns the first one that is close enough.
pub fn rationalize(x: f64, max_den: u64, tol: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let negative = x < 0.0;
    let mut rest = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    for _ in 0..64 {
        let a = rest.floor();
        if a > 1e15 {
            break;
        }
        let a = a as i128;
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        if q2 as u64 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let approx = p1 as f64 / q1 as f64;
        if (approx - x.abs()).abs() <= tol {
            let r = Rational::new(BigInt::from(p1), BigInt::from(q1));
            return Some(if negative { -r } else { r });
        }
        let frac = rest - a as f64;
        if frac <= f64::EPSILON {
            break;
        }
        rest = 1.0 / frac;
    }
    None
}

/// Least common multiple of the denominators of `values`.
pub fn common_denominator(values: &[Rational]) -> BigInt {
    values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Greatest common divisor of a list of integers (0 for the empty list).
pub fn gcd_all(values: &[BigInt]) -> BigInt {
    values.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v))
}

/// Integer square root test: returns `Some(r)` with `r*r == v` when `v` is a
/// perfect square rational.
pub fn rational_sqrt(v: &Rational) -> Option<Rational> {
    if v.is_negative() {
        return None;
    }
    let n = v.numer().sqrt();
    let d = v.denom().sqrt();
    if &(&n * &n) == v.numer() && &(&d * &d) == v.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}
