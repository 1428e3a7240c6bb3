//! Coefficient fields: double-precision complex numbers and exact complex
//! rationals, behind one trait so every series algorithm runs in either mode.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type Rational = BigRational;
/// Complex number with exact rational real and imaginary parts.
pub type QComplex = Complex<BigRational>;

/// Commutative ring operations needed by series arithmetic.
pub trait Ring:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// `self * o` without consuming the operands.
    fn product(&self, o: &Self) -> Self {
        self.clone() * o.clone()
    }
}

impl Ring for C64 {
    fn product(&self, o: &Self) -> Self {
        self * o
    }
}

impl Ring for QComplex {
    fn product(&self, o: &Self) -> Self {
        if self.im.is_zero() && o.im.is_zero() {
            QComplex::new(&self.re * &o.re, Rational::zero())
        } else {
            self * o
        }
    }
}

/// A ring with division by nonzero elements.
pub trait Field: Ring + Div<Output = Self> {}

impl<T> Field for T where T: Ring + Div<Output = T> {}

/// Scalar field of coefficients: `C64` (floating) or `QComplex` (exact).
pub trait Scalar: Field + Send + Sync + 'static {
    /// True when arithmetic is exact.
    const EXACT: bool;
    fn from_i64(v: i64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn from_rational_parts(re: &Rational, im: &Rational) -> Self;
    fn to_c64(&self) -> C64;
    fn conj(&self) -> Self;
    /// Modulus as a double.
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }
    /// Exact zero test in exact mode; `|x| <= tol` in floating mode.
    fn is_negligible(&self, tol: f64) -> bool;
    /// JSON encoding of the real and imaginary parts.
    fn json_parts(&self) -> (Value, Value);
    /// The value as an integer, when it is one (within `tol` in floating
    /// mode).
    fn as_integer(&self, tol: f64) -> Option<i64>;
}

impl Scalar for C64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        C64::new(v as f64, 0.0)
    }

    fn from_rational(q: &Rational) -> Self {
        C64::new(rational_to_f64(q), 0.0)
    }

    fn from_rational_parts(re: &Rational, im: &Rational) -> Self {
        C64::new(rational_to_f64(re), rational_to_f64(im))
    }

    fn to_c64(&self) -> C64 {
        *self
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn is_negligible(&self, tol: f64) -> bool {
        self.norm() <= tol
    }

    fn json_parts(&self) -> (Value, Value) {
        (float_value(self.re), float_value(self.im))
    }

    fn as_integer(&self, tol: f64) -> Option<i64> {
        let r = self.re.round();
        ((self.re - r).abs() <= tol && self.im.abs() <= tol && r.abs() < 9.0e15).then_some(r as i64)
    }
}

impl Scalar for QComplex {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        QComplex::new(Rational::from_integer(BigInt::from(v)), Rational::zero())
    }

    fn from_rational(q: &Rational) -> Self {
        QComplex::new(q.clone(), Rational::zero())
    }

    fn from_rational_parts(re: &Rational, im: &Rational) -> Self {
        QComplex::new(re.clone(), im.clone())
    }

    fn to_c64(&self) -> C64 {
        C64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    fn conj(&self) -> Self {
        QComplex::new(self.re.clone(), -self.im.clone())
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn json_parts(&self) -> (Value, Value) {
        (Value::String(rational_to_string(&self.re)), Value::String(rational_to_string(&self.im)))
    }

    fn as_integer(&self, _tol: f64) -> Option<i64> {
        if self.im.is_zero() && self.re.is_integer() {
            self.re.to_integer().to_i64()
        } else {
            None
        }
    }
}

fn float_value(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Converts a big rational to the nearest representable double.
pub fn rational_to_f64(q: &Rational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let n = q.numer().to_f64().unwrap_or(f64::NAN);
    let d = q.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Formats a rational as `p` or `p/q`.
pub fn rational_to_string(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p`, `-p`, or `p/q` into a rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational literal: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::InvalidInput(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

/// Shorthand for the rational `n/d`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact complex rational `n/d`.
pub fn qc(n: i64, d: i64) -> QComplex {
    QComplex::new(ratio(n, d), Rational::zero())
}

/// A real number read from JSON: exact when written as an integer or a
/// `p/q` string, floating when written with a fractional part or exponent.
#[derive(Debug, Clone, PartialEq)]
pub enum Real {
    Exact(Rational),
    Float(f64),
}

impl Real {
    pub fn parse(v: &Value) -> Result<Real> {
        match v {
            Value::Number(num) => {
                if let Some(i) = num.as_i64() {
                    Ok(Real::Exact(Rational::from_integer(BigInt::from(i))))
                } else if let Some(u) = num.as_u64() {
                    Ok(Real::Exact(Rational::from_integer(BigInt::from(u))))
                } else {
                    let f = num.as_f64().ok_or_else(|| Error::InvalidInput(format!("bad number {num}")))?;
                    Ok(Real::Float(f))
                }
            }
            Value::String(s) => Ok(Real::Exact(parse_rational(s)?)),
            Value::Null => Ok(Real::Exact(Rational::zero())),
            other => Err(Error::InvalidInput(format!("expected a number, got {other}"))),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(q) => rational_to_f64(q),
            Real::Float(f) => *f,
        }
    }
}

/// A complex number read from JSON before the coefficient mode is fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct RawComplex {
    pub re: Real,
    pub im: Real,
}

impl RawComplex {
    /// Accepts `[re, im]`, `{"re": .., "im": ..}`, or a bare real.
    pub fn parse(v: &Value) -> Result<RawComplex> {
        match v {
            Value::Array(a) if a.len() == 2 => Ok(RawComplex { re: Real::parse(&a[0])?, im: Real::parse(&a[1])? }),
            Value::Object(o) => Ok(RawComplex {
                re: Real::parse(o.get("re").unwrap_or(&Value::Null))?,
                im: Real::parse(o.get("im").unwrap_or(&Value::Null))?,
            }),
            Value::Number(_) | Value::String(_) => {
                Ok(RawComplex { re: Real::parse(v)?, im: Real::Exact(Rational::zero()) })
            }
            other => Err(Error::InvalidInput(format!("expected a complex number, got {other}"))),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.re.is_exact() && self.im.is_exact()
    }

    pub fn to_c64(&self) -> C64 {
        C64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// Exact value; fails on floating components.
    pub fn to_exact(&self) -> Result<QComplex> {
        match (&self.re, &self.im) {
            (Real::Exact(a), Real::Exact(b)) => Ok(QComplex::new(a.clone(), b.clone())),
            _ => Err(Error::InexactInput("floating-point coefficient".into())),
        }
    }

    /// Converts into the requested scalar type.
    pub fn to_scalar<T: Scalar>(&self) -> Result<T> {
        if T::EXACT {
            let q = self.to_exact()?;
            Ok(T::from_rational_parts(&q.re, &q.im))
        } else {
            let c = self.to_c64();
            Ok(T::from_rational_parts(
                &Rational::from_float(c.re).unwrap_or_else(Rational::zero),
                &Rational::from_float(c.im).unwrap_or_else(Rational::zero),
            ))
        }
    }
}

/// Encodes a scalar as `[re, im]`.
pub fn scalar_to_json<T: Scalar>(x: &T) -> Value {
    let (re, im) = x.json_parts();
    Value::Array(vec![re, im])
}
