//! A pair `(a, b) = (q², p)` in `ℝ[x, y]` ordered by sums of squares with
//! `1 ≤ a`, `0 ≤ ab` and `b ≱ 0`, so the order is not radical.

use serde_json::{json, Value};

use super::certificate::{verify_certificate, SosCertificate};
use super::witness::{non_sos_witness, DualWitness, WitnessOutcome};
use crate::error::Result;
use crate::poly::{Coefficient, ExactPolynomial, Mode, Monomial, Polynomial};

fn poly<C: Coefficient>(terms: &[([u32; 2], i64)]) -> Polynomial<C> {
    Polynomial::from_terms(
        2,
        terms
            .iter()
            .map(|(e, v)| (Monomial::new(e.to_vec()), C::from_ratio(*v, 1))),
    )
    .expect("two variables")
}

/// `p = x²y²(x² + y² − 1) + 1`, pointwise positive and not a sum of squares.
pub fn positive_non_square<C: Coefficient>() -> Polynomial<C> {
    poly(&[([4, 2], 1), ([2, 4], 1), ([2, 2], -1), ([0, 0], 1)])
}

/// `q = x² + y² + 1`.
pub fn multiplier<C: Coefficient>() -> Polynomial<C> {
    poly(&[([2, 0], 1), ([0, 2], 1), ([0, 0], 1)])
}

/// `q = x·x + y·y + 1·1`.
pub fn multiplier_certificate<C: Coefficient>() -> SosCertificate<C> {
    SosCertificate::new(vec![poly(&[([1, 0], 1)]), poly(&[([0, 1], 1)]), poly(&[([0, 0], 1)])])
}

/// `pq = (x³y)² + (x²y²)² + (xy³)² + (xy)² + x² + y² + (x²y² − 1)²`.
pub fn product_certificate<C: Coefficient>() -> SosCertificate<C> {
    SosCertificate::new(vec![
        poly(&[([3, 1], 1)]),
        poly(&[([2, 2], 1)]),
        poly(&[([1, 3], 1)]),
        poly(&[([1, 1], 1)]),
        poly(&[([1, 0], 1)]),
        poly(&[([0, 1], 1)]),
        poly(&[([2, 2], 1), ([0, 0], -1)]),
    ])
}

/// `q² − 1 = (x² + y²)² + (x + y)² + (x − y)²`.
pub fn unit_gap_certificate<C: Coefficient>() -> SosCertificate<C> {
    SosCertificate::new(vec![
        poly(&[([2, 0], 1), ([0, 2], 1)]),
        poly(&[([1, 0], 1), ([0, 1], 1)]),
        poly(&[([1, 0], 1), ([0, 1], -1)]),
    ])
}

/// Pairwise products `r_i s_j` of two certificates, a certificate for the product.
pub fn product_of_certificates<C: Coefficient>(a: &SosCertificate<C>, b: &SosCertificate<C>) -> SosCertificate<C> {
    SosCertificate::new(
        a.squares
            .iter()
            .flat_map(|r| b.squares.iter().map(move |s| r * s))
            .collect(),
    )
}

#[derive(Debug, Clone)]
pub struct NonradicalStep {
    pub name: &'static str,
    pub passed: bool,
    pub exact: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct NonradicalReport {
    pub steps: Vec<NonradicalStep>,
    pub witness: Option<DualWitness>,
}

impl NonradicalReport {
    /// All four steps ran and passed.
    pub fn is_complete(&self) -> bool {
        self.steps.len() == 4 && self.steps.iter().all(|s| s.passed)
    }

    /// 1-based index of the first failing step.
    pub fn failed_step(&self) -> Option<usize> {
        self.steps.iter().position(|s| !s.passed).map(|i| i + 1)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "complete": self.is_complete(),
            "failed_step": self.failed_step(),
            "steps": self.steps.iter().map(|s| json!({
                "name": s.name,
                "passed": s.passed,
                "exact": s.exact,
                "detail": s.detail,
            })).collect::<Vec<_>>(),
            "witness": self.witness.as_ref().map(DualWitness::to_json),
        })
    }
}

const WITNESS_ITERATIONS: usize = 500;
const WITNESS_TOL: f64 = 1e-9;

/// Runs the four checks in order and stops at the first failure.
pub fn demonstrate_nonradical() -> Result<NonradicalReport> {
    let p: ExactPolynomial = positive_non_square();
    let q: ExactPolynomial = multiplier();
    let pq = &p * &q;
    let mut report = NonradicalReport {
        steps: Vec::new(),
        witness: None,
    };

    let pq_cert: SosCertificate<crate::poly::ExactComplex> = product_certificate();
    let ok = verify_certificate(&pq, &pq_cert, Mode::Exact)?;
    report.steps.push(NonradicalStep {
        name: "pq is a sum of squares",
        passed: ok,
        exact: true,
        detail: format!("{} squares, rational expansion equality", pq_cert.len()),
    });
    if !ok {
        return Ok(report);
    }

    let qpq = &(&q * &p) * &q;
    let qpq_cert = product_of_certificates(&multiplier_certificate(), &pq_cert);
    let commute = &(&q * &q) * &p == &p * &(&q * &q);
    let ok = commute && verify_certificate(&qpq, &qpq_cert, Mode::Exact)?;
    report.steps.push(NonradicalStep {
        name: "qpq is a sum of squares",
        passed: ok,
        exact: true,
        detail: format!(
            "{} squares from products of q = x·x + y·y + 1 with the pq certificate; q² and p commute",
            qpq_cert.len()
        ),
    });
    if !ok {
        return Ok(report);
    }

    let gap = &(&q * &q) - &ExactPolynomial::one(2);
    let ok = verify_certificate(&gap, &unit_gap_certificate::<crate::poly::ExactComplex>(), Mode::Exact)?;
    report.steps.push(NonradicalStep {
        name: "q² − 1 is a sum of squares",
        passed: ok,
        exact: true,
        detail: "(x²+y²)² + (x+y)² + (x−y)²".to_string(),
    });
    if !ok {
        return Ok(report);
    }

    let outcome = non_sos_witness(&p, WITNESS_ITERATIONS, WITNESS_TOL)?;
    let (ok, detail) = match outcome {
        WitnessOutcome::Witness(w) => {
            let checked = w.check(&p, WITNESS_TOL)?;
            let detail = format!(
                "L(1) = 1, L(p) = {:.6e}, moment matrix min eigenvalue {:.3e}",
                w.value, w.min_eigenvalue
            );
            report.witness = Some(w);
            (checked, detail)
        }
        WitnessOutcome::NotFound { best_value, .. } => (false, format!("no witness; best L(p) = {best_value:.3e}")),
    };
    report.steps.push(NonradicalStep {
        name: "p is not a sum of squares",
        passed: ok,
        exact: false,
        detail,
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_expand_as_stated() {
        let p: ExactPolynomial = positive_non_square();
        let pq = &p * &multiplier::<crate::poly::ExactComplex>();
        let expected: ExactPolynomial = poly(&[
            ([6, 2], 1),
            ([4, 4], 2),
            ([2, 6], 1),
            ([2, 2], -1),
            ([2, 0], 1),
            ([0, 2], 1),
            ([0, 0], 1),
        ]);
        assert_eq!(pq, expected);
        assert_eq!(
            product_certificate::<crate::poly::ExactComplex>().sum_of_squares(2),
            expected
        );
    }

    #[test]
    fn all_four_steps_pass() {
        let r = demonstrate_nonradical().unwrap();
        assert!(r.is_complete(), "{:?}", r.steps);
        assert!(r.steps[0].exact && r.steps[2].exact);
        assert!(r.witness.as_ref().unwrap().value <= -1e-3);
        assert_eq!(r.to_json()["complete"], json!(true));
    }
}
