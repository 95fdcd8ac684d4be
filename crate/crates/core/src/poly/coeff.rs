use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Complex number with exact rational parts.
pub type ExactComplex = Complex<BigRational>;

/// Coefficient arithmetic mode of a polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

/// Scalar field for polynomial coefficients: `ℂ` over exact rationals or over `f64`.
pub trait Coefficient:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    const MODE: Mode;

    /// Complex conjugate.
    fn star(&self) -> Self;
    /// `Re(c) + 0i`.
    fn real_part(&self) -> Self;
    /// `Im(c) + 0i`.
    fn imag_part(&self) -> Self;
    fn is_real(&self) -> bool;
    fn imaginary_unit() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_c64(&self) -> Complex64;
    /// Exact conversion for the rational mode (every finite double is a dyadic rational).
    fn from_c64(z: Complex64) -> Option<Self>;
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }
    fn re_json(&self) -> Value;
    fn im_json(&self) -> Value;
    fn from_json_parts(re: &Value, im: &Value, field: &str) -> Result<Self>;
}

impl Coefficient for Complex64 {
    const MODE: Mode = Mode::Float;

    fn star(&self) -> Self {
        Complex64::new(self.re, -self.im)
    }
    fn real_part(&self) -> Self {
        Complex64::new(self.re, 0.0)
    }
    fn imag_part(&self) -> Self {
        Complex64::new(self.im, 0.0)
    }
    fn is_real(&self) -> bool {
        self.im == 0.0
    }
    fn imaginary_unit() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn from_c64(z: Complex64) -> Option<Self> {
        Some(z)
    }
    fn re_json(&self) -> Value {
        float_json(self.re)
    }
    fn im_json(&self) -> Value {
        float_json(self.im)
    }
    fn from_json_parts(re: &Value, im: &Value, field: &str) -> Result<Self> {
        Ok(Complex64::new(
            float_from_json(re, &format!("{field}.re"))?,
            float_from_json(im, &format!("{field}.im"))?,
        ))
    }
}

impl Coefficient for ExactComplex {
    const MODE: Mode = Mode::Exact;

    fn star(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn real_part(&self) -> Self {
        Complex::new(self.re.clone(), Rational::zero())
    }
    fn imag_part(&self) -> Self {
        Complex::new(self.im.clone(), Rational::zero())
    }
    fn is_real(&self) -> bool {
        self.im.is_zero()
    }
    fn imaginary_unit() -> Self {
        Complex::new(Rational::zero(), Rational::one())
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(Rational::new(BigInt::from(num), BigInt::from(den)), Rational::zero())
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
    fn from_c64(z: Complex64) -> Option<Self> {
        Some(Complex::new(Rational::from_f64(z.re)?, Rational::from_f64(z.im)?))
    }
    fn re_json(&self) -> Value {
        Value::String(rational_to_string(&self.re))
    }
    fn im_json(&self) -> Value {
        Value::String(rational_to_string(&self.im))
    }
    fn from_json_parts(re: &Value, im: &Value, field: &str) -> Result<Self> {
        Ok(Complex::new(
            rational_from_json(re, &format!("{field}.re"))?,
            rational_from_json(im, &format!("{field}.im"))?,
        ))
    }
}

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

/// `"num/den"` with a positive denominator.
pub fn rational_to_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn rational_from_str(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

fn rational_from_json(v: &Value, field: &str) -> Result<Rational> {
    match v {
        Value::String(s) => {
            rational_from_str(s).ok_or_else(|| Error::parse(field, format!("`{s}` is not a rational `num/den`")))
        }
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from_integer(BigInt::from(i)))
            } else {
                n.as_f64()
                    .and_then(Rational::from_f64)
                    .ok_or_else(|| Error::parse(field, "number is not representable"))
            }
        }
        _ => Err(Error::parse(field, "expected a `num/den` string")),
    }
}

fn float_json(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub(crate) fn float_from_json(v: &Value, field: &str) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::parse(field, "number out of range")),
        Value::String(s) => rational_from_str(s)
            .map(|q| rational_to_f64(&q))
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::parse(field, format!("`{s}` is not a number"))),
        _ => Err(Error::parse(field, "expected a number")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_string_round_trip() {
        let q = Rational::new(BigInt::from(-6), BigInt::from(8));
        let s = rational_to_string(&q);
        assert_eq!(s, "-3/4");
        assert_eq!(rational_from_str(&s), Some(q));
        assert_eq!(rational_from_str("5"), Some(Rational::from_integer(5.into())));
        assert_eq!(rational_from_str("1/0"), None);
        assert_eq!(rational_from_str("a/b"), None);
    }

    #[test]
    fn float_to_exact_is_exact() {
        let z = ExactComplex::from_c64(Complex64::new(0.1, -2.5)).unwrap();
        assert_eq!(z.to_c64(), Complex64::new(0.1, -2.5));
        assert!(ExactComplex::from_c64(Complex64::new(f64::NAN, 0.0)).is_none());
    }
}
