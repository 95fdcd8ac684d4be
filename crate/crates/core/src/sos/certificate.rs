use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::poly::{AnyPolynomial, Coefficient, ExactPolynomial, FloatPolynomial, Mode, Polynomial};

/// Squares `q_i` with `p = Σ q_i* q_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SosCertificate<C: Coefficient> {
    pub squares: Vec<Polynomial<C>>,
}

impl<C: Coefficient> SosCertificate<C> {
    pub fn new(squares: Vec<Polynomial<C>>) -> Self {
        SosCertificate { squares }
    }

    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }

    /// `Σ q_i* q_i`; the zero polynomial of the given arity when empty.
    pub fn sum_of_squares(&self, arity: usize) -> Polynomial<C> {
        let mut acc = Polynomial::zero(arity);
        for q in &self.squares {
            acc = &acc + &q.hermitian_square();
        }
        acc
    }

    pub fn to_float(&self) -> SosCertificate<num_complex::Complex64> {
        SosCertificate::new(self.squares.iter().map(Polynomial::to_float).collect())
    }

    pub fn to_json(&self) -> Value {
        json!({"squares": self.squares.iter().map(Polynomial::to_json).collect::<Vec<_>>()})
    }

    fn check_arity(&self, arity: usize) -> Result<()> {
        match self.squares.iter().find(|q| q.arity() != arity) {
            Some(q) => Err(Error::ArityMismatch {
                expected: arity,
                found: q.arity(),
            }),
            None => Ok(()),
        }
    }
}

/// Certificate read from JSON; squares may mix modes in the file, and are
/// then all promoted to exact when any of them is exact.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyCertificate {
    Exact(SosCertificate<crate::poly::ExactComplex>),
    Float(SosCertificate<num_complex::Complex64>),
}

impl AnyCertificate {
    pub fn from_json(v: &Value) -> Result<Self> {
        let arr = v
            .get("squares")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse("squares", "expected an array of polynomials"))?;
        let parsed = arr
            .iter()
            .enumerate()
            .map(|(i, q)| AnyPolynomial::from_json_at(q, &format!("squares[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        if parsed.iter().any(|q| matches!(q, AnyPolynomial::Exact(_))) {
            Ok(AnyCertificate::Exact(SosCertificate::new(
                parsed.iter().map(AnyPolynomial::to_exact).collect(),
            )))
        } else {
            Ok(AnyCertificate::Float(SosCertificate::new(
                parsed.iter().map(AnyPolynomial::to_float).collect(),
            )))
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            AnyCertificate::Exact(c) => c.to_json(),
            AnyCertificate::Float(c) => c.to_json(),
        }
    }

    pub fn to_exact(&self) -> SosCertificate<crate::poly::ExactComplex> {
        match self {
            AnyCertificate::Exact(c) => c.clone(),
            AnyCertificate::Float(c) => SosCertificate::new(
                c.squares
                    .iter()
                    .map(|q| q.to_exact().expect("parsed coefficients are finite"))
                    .collect(),
            ),
        }
    }

    pub fn to_float(&self) -> SosCertificate<num_complex::Complex64> {
        match self {
            AnyCertificate::Exact(c) => c.to_float(),
            AnyCertificate::Float(c) => c.clone(),
        }
    }
}

/// Float-mode acceptance threshold `1e-7 · (1 + max |p_γ|)`.
pub fn float_tolerance(p: &FloatPolynomial) -> f64 {
    1e-7 * (1.0 + p.max_coeff_magnitude())
}

/// Checks `p = Σ q_i* q_i`.
///
/// [`Mode::Exact`] expands over the rationals and demands equality; inputs
/// given in floating point are converted exactly (each double is a dyadic
/// rational). [`Mode::Float`] accepts a maximal coefficient deviation of
/// [`float_tolerance`].
pub fn verify_certificate<C: Coefficient, D: Coefficient>(
    p: &Polynomial<C>,
    cert: &SosCertificate<D>,
    mode: Mode,
) -> Result<bool> {
    cert.check_arity(p.arity())?;
    match mode {
        Mode::Exact => {
            let (Some(pe), Some(squares)) = (
                p.to_exact(),
                cert.squares
                    .iter()
                    .map(Polynomial::to_exact)
                    .collect::<Option<Vec<ExactPolynomial>>>(),
            ) else {
                return Ok(false);
            };
            Ok(SosCertificate::new(squares).sum_of_squares(p.arity()) == pe)
        }
        Mode::Float => {
            let pf = p.to_float();
            let diff = &cert.to_float().sum_of_squares(p.arity()) - &pf;
            Ok(diff.max_coeff_magnitude() <= float_tolerance(&pf))
        }
    }
}
