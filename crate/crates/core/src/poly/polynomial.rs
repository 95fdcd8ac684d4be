use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde_json::{json, Value};

use super::coeff::{Coefficient, ExactComplex, Mode};
use super::monomial::Monomial;
use crate::error::{Error, Result};

/// Sparse commutative polynomial in `arity` Hermitian variables.
///
/// Terms are kept canonical: no stored coefficient is zero, and the zero
/// polynomial is the empty table (its arity survives).
#[derive(Clone, PartialEq)]
pub struct Polynomial<C> {
    arity: usize,
    terms: BTreeMap<Monomial, C>,
}

pub type ExactPolynomial = Polynomial<ExactComplex>;
pub type FloatPolynomial = Polynomial<Complex64>;

impl<C: Coefficient> Polynomial<C> {
    pub fn zero(arity: usize) -> Self {
        Polynomial {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, C::one())
    }

    pub fn constant(arity: usize, c: C) -> Self {
        Self::term(Monomial::one(arity), c)
    }

    /// The generator `x_index` (0-based).
    pub fn var(arity: usize, index: usize) -> Self {
        Self::term(Monomial::var(arity, index), C::one())
    }

    pub fn term(m: Monomial, c: C) -> Self {
        let arity = m.arity();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { arity, terms }
    }

    /// Builds from `(exponents, coefficient)` pairs, merging repeats.
    pub fn from_terms<I>(arity: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, C)>,
    {
        let mut p = Self::zero(arity);
        for (m, c) in terms {
            if m.arity() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    found: m.arity(),
                });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    /// With Hermitian variables, `p* = p` exactly when every coefficient is real.
    pub fn is_hermitian(&self) -> bool {
        self.terms.values().all(C::is_real)
    }

    pub fn mode(&self) -> Mode {
        C::MODE
    }

    fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(m, sum);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity {
            Err(Error::ArityMismatch {
                expected: self.arity,
                found: other.arity,
            })
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = Self::zero(self.arity);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.arity);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.clone() * c.clone());
        }
        out
    }

    /// The involution: variables are Hermitian, so only coefficients are conjugated.
    pub fn star(&self) -> Self {
        Polynomial {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.star())).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut out = Self::one(self.arity);
        for _ in 0..exp {
            out = &out * self;
        }
        out
    }

    /// `self* · self`.
    pub fn hermitian_square(&self) -> Self {
        &self.star() * self
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        let mut out = Polynomial::zero(self.arity);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn to_float(&self) -> FloatPolynomial {
        self.map_coeffs(C::to_c64)
    }

    /// Exact rational image of the coefficients; fails only on non-finite values.
    pub fn to_exact(&self) -> Option<ExactPolynomial> {
        let mut out = ExactPolynomial::zero(self.arity);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), ExactComplex::from_c64(c.to_c64())?);
        }
        Some(out)
    }

    pub fn eval_real(&self, point: &[f64]) -> Complex64 {
        self.terms.iter().map(|(m, c)| c.to_c64() * m.eval_real(point)).sum()
    }

    pub fn max_coeff_magnitude(&self) -> f64 {
        self.terms.values().map(C::magnitude).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, c)| json!({"exps": m.exps(), "re": c.re_json(), "im": c.im_json()}))
            .collect();
        json!({"arity": self.arity, "mode": C::MODE.as_str(), "terms": terms})
    }
}

impl<C: Coefficient> Add for &Polynomial<C> {
    type Output = Polynomial<C>;
    /// Panics on arity mismatch; use [`Polynomial::try_add`] for fallible input.
    fn add(self, rhs: Self) -> Polynomial<C> {
        self.try_add(rhs).expect("polynomial arity mismatch")
    }
}

impl<C: Coefficient> Sub for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: Self) -> Polynomial<C> {
        self.try_sub(rhs).expect("polynomial arity mismatch")
    }
}

impl<C: Coefficient> Mul for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: Self) -> Polynomial<C> {
        self.try_mul(rhs).expect("polynomial arity mismatch")
    }
}

impl<C: Coefficient> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        Polynomial {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl<C: Coefficient> fmt::Debug for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let z = c.to_c64();
            if z.im == 0.0 {
                write!(f, "{}*{}", z.re, m)?;
            } else {
                write!(f, "({}{:+}i)*{}", z.re, z.im, m)?;
            }
        }
        Ok(())
    }
}

/// Polynomial whose coefficient mode is only known at run time (parsed input).
#[derive(Debug, Clone, PartialEq)]
pub enum AnyPolynomial {
    Exact(ExactPolynomial),
    Float(FloatPolynomial),
}

impl AnyPolynomial {
    pub fn arity(&self) -> usize {
        match self {
            AnyPolynomial::Exact(p) => p.arity(),
            AnyPolynomial::Float(p) => p.arity(),
        }
    }

    pub fn to_float(&self) -> FloatPolynomial {
        match self {
            AnyPolynomial::Exact(p) => p.to_float(),
            AnyPolynomial::Float(p) => p.clone(),
        }
    }

    pub fn to_exact(&self) -> ExactPolynomial {
        match self {
            AnyPolynomial::Exact(p) => p.clone(),
            // finite by construction of the parser
            AnyPolynomial::Float(p) => p.to_exact().expect("finite coefficients"),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            AnyPolynomial::Exact(p) => p.to_json(),
            AnyPolynomial::Float(p) => p.to_json(),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        Self::from_json_at(v, "")
    }

    pub(crate) fn from_json_at(v: &Value, prefix: &str) -> Result<Self> {
        let field = |name: &str| {
            if prefix.is_empty() {
                name.to_string()
            } else {
                format!("{prefix}.{name}")
            }
        };
        let obj = v
            .as_object()
            .ok_or_else(|| Error::parse(field("polynomial"), "expected an object"))?;
        let mode = match obj.get("mode") {
            None => Mode::Float,
            Some(Value::String(s)) if s == "exact" => Mode::Exact,
            Some(Value::String(s)) if s == "float" => Mode::Float,
            Some(_) => return Err(Error::parse(field("mode"), "expected \"exact\" or \"float\"")),
        };
        match mode {
            Mode::Exact => Ok(AnyPolynomial::Exact(parse_poly(obj, &field)?)),
            Mode::Float => Ok(AnyPolynomial::Float(parse_poly(obj, &field)?)),
        }
    }
}

fn parse_poly<C: Coefficient>(
    obj: &serde_json::Map<String, Value>,
    field: &dyn Fn(&str) -> String,
) -> Result<Polynomial<C>> {
    let arity = obj
        .get("arity")
        .and_then(Value::as_u64)
        .filter(|&a| a > 0 && a <= 64)
        .ok_or_else(|| Error::parse(field("arity"), "expected a positive integer"))? as usize;
    let terms = obj
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse(field("terms"), "expected an array"))?;
    let mut p = Polynomial::zero(arity);
    for (k, t) in terms.iter().enumerate() {
        let at = field(&format!("terms[{k}]"));
        let exps = parse_exps(t.get("exps"), &format!("{at}.exps"))?;
        if exps.len() != arity {
            return Err(Error::parse(
                format!("{at}.exps"),
                format!("expected {arity} exponents, found {}", exps.len()),
            ));
        }
        let zero = Value::from(0);
        let re = t.get("re").ok_or_else(|| Error::parse(format!("{at}.re"), "missing"))?;
        let im = t.get("im").unwrap_or(&zero);
        let c = C::from_json_parts(re, im, &at)?;
        p.add_term(Monomial::new(exps), c);
    }
    Ok(p)
}

pub(crate) fn parse_exps(v: Option<&Value>, field: &str) -> Result<Vec<u32>> {
    let arr = v
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse(field, "expected an array of exponents"))?;
    arr.iter()
        .map(|e| {
            e.as_u64()
                .filter(|&e| e <= 1024)
                .map(|e| e as u32)
                .ok_or_else(|| Error::parse(field, "exponents must be small nonnegative integers"))
        })
        .collect()
}

/// `a = real_part + i·imag_part` with both parts Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianDecomposition<C: Coefficient> {
    pub real_part: Polynomial<C>,
    pub imag_part: Polynomial<C>,
}

impl<C: Coefficient> HermitianDecomposition<C> {
    pub fn reassemble(&self) -> Polynomial<C> {
        &self.real_part + &self.imag_part.scale(&C::imaginary_unit())
    }
}

/// `c_r = (a + a*)/2`, `c_i = (a − a*)/(2i)`, computed coefficient-wise.
pub fn hermitian_decompose<C: Coefficient>(a: &Polynomial<C>) -> HermitianDecomposition<C> {
    HermitianDecomposition {
        real_part: a.map_coeffs(C::real_part),
        imag_part: a.map_coeffs(C::imag_part),
    }
}

/// All monomials of `p` up to the Monomial order, convenience for tests and solvers.
pub fn support<C: Coefficient>(p: &Polynomial<C>) -> Vec<Monomial> {
    p.terms().map(|(m, _)| m.clone()).collect()
}

/// Sum of the given polynomials; `arity` is used when the list is empty.
pub fn sum<C: Coefficient>(arity: usize, items: &[Polynomial<C>]) -> Polynomial<C> {
    items.iter().fold(Polynomial::zero(arity), |acc, p| &acc + p)
}
