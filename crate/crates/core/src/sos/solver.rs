//! Gram-matrix feasibility for the cone of sums of Hermitian squares.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::{json, Value};

use super::certificate::SosCertificate;
use crate::error::{Error, Result};
use crate::numeric::{psd_project, sym_eig, DenseMatrix};
use crate::poly::{monomials_up_to, Coefficient, FloatPolynomial, Monomial, Polynomial};

/// Largest Gram basis handled by the dense solvers.
pub const MAX_GRAM_BASIS: usize = 64;

/// Coefficient-matching constraint `Σ_{(α,β) ∈ entries} G[α][β] = value`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramConstraint {
    pub monomial: Monomial,
    /// Ordered index pairs into the Gram basis, both `(a, b)` and `(b, a)`.
    pub entries: Vec<(usize, usize)>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SosProblem {
    pub target: FloatPolynomial,
    pub half_degree: usize,
    pub gram_basis: Vec<Monomial>,
    pub constraints: Vec<GramConstraint>,
}

impl SosProblem {
    pub fn arity(&self) -> usize {
        self.target.arity()
    }

    pub fn basis_size(&self) -> usize {
        self.gram_basis.len()
    }

    /// `Σ_{α,β} G[α][β] x^{α+β}` for a Gram matrix on `gram_basis`.
    pub fn gram_polynomial(&self, g: &DenseMatrix) -> FloatPolynomial {
        FloatPolynomial::from_terms(
            self.arity(),
            self.constraints.iter().map(|c| {
                let s: f64 = c.entries.iter().map(|&(a, b)| g[(a, b)]).sum();
                (c.monomial.clone(), Complex64::new(s, 0.0))
            }),
        )
        .expect("constraint monomials share the target arity")
    }

    /// Largest `|Σ G − p_γ|` over all constraints.
    pub fn constraint_residual(&self, g: &DenseMatrix) -> f64 {
        self.constraints
            .iter()
            .map(|c| (c.entries.iter().map(|&(a, b)| g[(a, b)]).sum::<f64>() - c.value).abs())
            .fold(0.0, f64::max)
    }

    fn scale(&self) -> f64 {
        1.0 + self.target.max_coeff_magnitude()
    }
}

pub(crate) fn check_basis_size(arity: usize, half_degree: usize) -> Result<()> {
    match crate::poly::monomial_count(arity, half_degree) {
        Some(size) if size <= MAX_GRAM_BASIS => Ok(()),
        size => Err(Error::DeskScaleExceeded {
            what: match size {
                Some(size) => format!("Gram basis of size {size} (limit {MAX_GRAM_BASIS})"),
                None => format!("Gram basis beyond {MAX_GRAM_BASIS} monomials"),
            },
        }),
    }
}

/// Coefficient-matching table for `p` over the graded-lex basis of degree `≤ deg(p)/2`.
///
/// Bases beyond [`MAX_GRAM_BASIS`] are refused here already, before any enumeration.
pub fn build_problem<C: Coefficient>(p: &Polynomial<C>) -> Result<SosProblem> {
    if !p.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let degree = p.degree();
    if degree % 2 == 1 {
        return Err(Error::OddDegree { degree });
    }
    let d = degree / 2;
    let n = p.arity();
    check_basis_size(n, d)?;
    let target = p.to_float();
    let gram_basis = monomials_up_to(n, d);
    let mut groups: BTreeMap<Monomial, Vec<(usize, usize)>> = monomials_up_to(n, degree)
        .into_iter()
        .map(|m| (m, Vec::new()))
        .collect();
    for (a, ma) in gram_basis.iter().enumerate() {
        for (b, mb) in gram_basis.iter().enumerate() {
            groups
                .get_mut(&ma.mul(mb))
                .expect("sum of basis degrees ≤ 2d")
                .push((a, b));
        }
    }
    let constraints = groups
        .into_iter()
        .map(|(monomial, entries)| {
            let value = target.coeff(&monomial).re;
            GramConstraint {
                monomial,
                entries,
                value,
            }
        })
        .collect();
    Ok(SosProblem {
        target,
        half_degree: d,
        gram_basis,
        constraints,
    })
}

/// Basis indices that can carry a nonzero Gram row.
///
/// Index `α` is dropped when `p_{2α} = 0` and `2α` has no representation as
/// `β + β'` with distinct surviving `β, β'`: then `G[α][α] = 0` for every PSD
/// Gram of `p`, which forces the whole row to vanish. Repeated until stable.
pub fn pruned_basis(prob: &SosProblem) -> Vec<usize> {
    let b = &prob.gram_basis;
    let mut alive = vec![true; b.len()];
    loop {
        let mut changed = false;
        for a in 0..b.len() {
            if !alive[a] {
                continue;
            }
            let square = b[a].mul(&b[a]);
            if prob.target.coeff(&square).re != 0.0 {
                continue;
            }
            let mixed = (0..b.len())
                .any(|c| c != a && alive[c] && (0..b.len()).any(|e| e != c && alive[e] && b[c].mul(&b[e]) == square));
            if !mixed {
                alive[a] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (0..b.len()).filter(|&a| alive[a]).collect()
}

#[derive(Debug, Clone)]
pub enum Feasibility {
    /// PSD Gram on the full basis meeting every constraint within tolerance.
    Feasible {
        gram: DenseMatrix,
        iterations: usize,
        residual: f64,
    },
    /// Distance between the last affine and PSD iterates.
    Undecided { gap: f64, iterations: usize },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible { .. })
    }
}

/// Dykstra alternating projections between the coefficient-matching affine
/// space and the PSD cone, on the pruned basis.
///
/// The affine projection is exact: the constraint groups partition the Gram
/// entries, so the normal equations are diagonal and each group is shifted
/// uniformly by its defect. Success requires constraint residual
/// `≤ tol · (1 + max |p_γ|)` and minimum eigenvalue `≥ −tol`.
pub fn sos_feasibility(prob: &SosProblem, max_iter: usize, tol: f64) -> Result<Feasibility> {
    let full = prob.basis_size();
    if full > MAX_GRAM_BASIS {
        return Err(Error::DeskScaleExceeded {
            what: format!("Gram basis of size {full} (limit {MAX_GRAM_BASIS})"),
        });
    }
    let keep = pruned_basis(prob);
    let k = keep.len();
    let position: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &a)| (a, i)).collect();

    // Constraints restricted to surviving entries; groups emptied by pruning
    // keep their value so that a nonzero requirement stays visibly violated.
    let reduced: Vec<(Vec<(usize, usize)>, f64)> = prob
        .constraints
        .iter()
        .map(|c| {
            let entries = c
                .entries
                .iter()
                .filter_map(|(a, b)| Some((*position.get(a)?, *position.get(b)?)))
                .collect();
            (entries, c.value)
        })
        .collect();
    let tol_abs = tol * prob.scale();
    let pad = |g: &DenseMatrix| {
        let mut out = DenseMatrix::zeros(full, full);
        for (i, &a) in keep.iter().enumerate() {
            for (j, &b) in keep.iter().enumerate() {
                out[(a, b)] = g[(i, j)];
            }
        }
        out
    };
    if k == 0 {
        let gram = DenseMatrix::zeros(full, full);
        let residual = prob.constraint_residual(&gram);
        return Ok(if residual <= tol_abs {
            Feasibility::Feasible {
                gram,
                iterations: 0,
                residual,
            }
        } else {
            Feasibility::Undecided {
                gap: residual,
                iterations: 0,
            }
        });
    }

    let affine = |g: &DenseMatrix| {
        let mut out = g.clone();
        for (entries, value) in &reduced {
            if entries.is_empty() {
                continue;
            }
            let s: f64 = entries.iter().map(|&(a, b)| g[(a, b)]).sum();
            let shift = (value - s) / entries.len() as f64;
            for &(a, b) in entries {
                out[(a, b)] += shift;
            }
        }
        out
    };

    let mut x = DenseMatrix::zeros(k, k);
    let mut p = DenseMatrix::zeros(k, k);
    let mut q = DenseMatrix::zeros(k, k);
    let mut gap = f64::INFINITY;
    for it in 1..=max_iter {
        let y = affine(&x.add(&p));
        p = x.add(&p).sub(&y);
        let z = y.add(&q);
        x = psd_project(&z)?;
        q = z.sub(&x);
        gap = x.sub(&y).frobenius_norm();

        let gram = pad(&x);
        let residual = prob.constraint_residual(&gram);
        if residual <= tol_abs && sym_eig(&x)?.min_value() >= -tol {
            return Ok(Feasibility::Feasible {
                gram,
                iterations: it,
                residual,
            });
        }
    }
    Ok(Feasibility::Undecided {
        gap,
        iterations: max_iter,
    })
}

/// Squares `q_i = √λ_i · (v_iᵀ basis)` from the eigendecomposition of a PSD Gram.
pub fn extract_certificate(g: &DenseMatrix, basis: &[Monomial]) -> Result<SosCertificate<Complex64>> {
    if g.rows() != basis.len() || !g.is_square() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            found: g.rows(),
        });
    }
    let arity = basis.first().map_or(0, Monomial::arity);
    if basis.is_empty() {
        return Ok(SosCertificate::new(Vec::new()));
    }
    let e = sym_eig(g)?;
    let top = e.max_value().max(0.0);
    let floor = 1e-8 * (1.0 + top);
    if e.min_value() < -floor {
        return Err(Error::NotPsd { pivot: e.min_value() });
    }
    let squares = (0..basis.len())
        .filter(|&i| e.values[i] > 1e-14 * top)
        .map(|i| {
            let s = e.values[i].sqrt();
            let v = e.vector(i);
            FloatPolynomial::from_terms(
                arity,
                basis
                    .iter()
                    .zip(v)
                    .filter(|(_, c)| *c != 0.0)
                    .map(|(m, c)| (m.clone(), Complex64::new(s * c, 0.0))),
            )
            .expect("basis shares one arity")
        })
        .collect();
    Ok(SosCertificate::new(squares))
}

impl Feasibility {
    pub fn to_json(&self) -> Value {
        match self {
            Feasibility::Feasible {
                gram,
                iterations,
                residual,
            } => json!({
                "status": "feasible",
                "gram": gram.to_rows(),
                "iterations": iterations,
                "residual": residual,
            }),
            Feasibility::Undecided { gap, iterations } => json!({
                "status": "undecided",
                "gap": gap,
                "iterations": iterations,
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Mode;
    use crate::sos::verify_certificate;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn poly(n: usize, terms: &[(&[u32], f64)]) -> FloatPolynomial {
        FloatPolynomial::from_terms(n, terms.iter().map(|(e, v)| (Monomial::new(e.to_vec()), c(*v)))).unwrap()
    }

    #[test]
    fn problem_shapes() {
        let p = poly(1, &[(&[2], 1.0)]);
        let prob = build_problem(&p).unwrap();
        assert_eq!(prob.basis_size(), 2);
        assert_eq!(prob.constraints.len(), 3);
        let xx = prob
            .constraints
            .iter()
            .find(|c| c.monomial == Monomial::new(vec![2]))
            .unwrap();
        assert_eq!(xx.entries, vec![(1, 1)]);
        assert_eq!(xx.value, 1.0);

        let p = poly(2, &[(&[4, 2], 1.0), (&[2, 4], 1.0), (&[2, 2], -1.0), (&[0, 0], 1.0)]);
        let prob = build_problem(&p).unwrap();
        assert_eq!(prob.basis_size(), 10);
        assert_eq!(prob.constraints.len(), 28);
        let total: usize = prob.constraints.iter().map(|c| c.entries.len()).sum();
        assert_eq!(total, 100);
    }

    #[test]
    fn problem_errors() {
        let odd = poly(1, &[(&[3], 1.0)]);
        assert_eq!(build_problem(&odd).unwrap_err().kind(), "OddDegree");
        let complex = FloatPolynomial::term(Monomial::new(vec![2]), Complex64::new(0.0, 1.0));
        assert_eq!(build_problem(&complex).unwrap_err().kind(), "NotHermitian");
        let huge = FloatPolynomial::term(Monomial::new(vec![1000, 1000]), c(1.0));
        assert_eq!(build_problem(&huge).unwrap_err().kind(), "DeskScaleExceeded");
    }

    #[test]
    fn x_squared_has_the_expected_gram() {
        let prob = build_problem(&poly(1, &[(&[2], 1.0)])).unwrap();
        let Feasibility::Feasible { gram, .. } = sos_feasibility(&prob, 100, 1e-9).unwrap() else {
            panic!("x² must be feasible");
        };
        assert!(
            gram.sub(&DenseMatrix::from_rows(&[vec![0.0, 0.0], vec![0.0, 1.0]]))
                .max_abs()
                < 1e-9
        );
        let cert = extract_certificate(&gram, &prob.gram_basis).unwrap();
        assert_eq!(cert.len(), 1);
        assert!(verify_certificate(&prob.target, &cert, Mode::Float).unwrap());
    }

    #[test]
    fn shifted_square_plus_x_squared() {
        // (x²y² − 1)² + x²
        let p = poly(2, &[(&[4, 4], 1.0), (&[2, 2], -2.0), (&[0, 0], 1.0), (&[2, 0], 1.0)]);
        let prob = build_problem(&p).unwrap();
        let out = sos_feasibility(&prob, 20_000, 1e-10).unwrap();
        let Feasibility::Feasible { gram, .. } = out else {
            panic!("expected feasible, got {out:?}");
        };
        let cert = extract_certificate(&gram, &prob.gram_basis).unwrap();
        assert!(verify_certificate(&p, &cert, Mode::Float).unwrap());
    }

    #[test]
    fn positive_non_square_stalls() {
        let p = poly(2, &[(&[4, 2], 1.0), (&[2, 4], 1.0), (&[2, 2], -1.0), (&[0, 0], 1.0)]);
        let prob = build_problem(&p).unwrap();
        assert_eq!(pruned_basis(&prob).len(), 4);
        match sos_feasibility(&prob, 2000, 1e-9).unwrap() {
            Feasibility::Undecided { gap, .. } => assert!(gap > 1e-3),
            other => panic!("expected undecided, got {other:?}"),
        }
    }

    #[test]
    fn extraction_rejects_indefinite() {
        let g = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        let basis = monomials_up_to(1, 1);
        assert_eq!(extract_certificate(&g, &basis).unwrap_err().kind(), "NotPsd");
    }

    #[test]
    fn rank_one_gram_gives_one_square() {
        let v = [1.0, -2.0, 0.5];
        let g = DenseMatrix::from_fn(3, 3, |i, j| v[i] * v[j]);
        let cert = extract_certificate(&g, &monomials_up_to(1, 2)).unwrap();
        assert_eq!(cert.len(), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn random_psd_gram_recombines(seed in 0u64..10_000, n in 1usize..=2, d in 1usize..=2) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let basis = monomials_up_to(n, d);
            let m = basis.len();
            let f = DenseMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0));
            let g = f.matmul(&f.transpose());
            let cert = extract_certificate(&g, &basis).unwrap();
            let mut poly_terms: BTreeMap<Monomial, f64> = BTreeMap::new();
            for a in 0..m {
                for b in 0..m {
                    *poly_terms.entry(basis[a].mul(&basis[b])).or_default() += g[(a, b)];
                }
            }
            let target = FloatPolynomial::from_terms(n, poly_terms.into_iter().map(|(k, v)| (k, c(v)))).unwrap();
            let diff = &cert.sum_of_squares(n) - &target;
            prop_assert!(diff.max_coeff_magnitude() < 1e-7);
        }

        #[test]
        fn random_sums_of_squares_are_certified(seed in 0u64..10_000, n in 1usize..=2) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let basis = monomials_up_to(n, 2);
            let squares: Vec<FloatPolynomial> = (0..basis.len() + 1)
                .map(|_| FloatPolynomial::from_terms(n, basis.iter().map(|m| (m.clone(), c(rng.gen_range(-1.0..1.0))))).unwrap())
                .collect();
            let p = SosCertificate::new(squares).sum_of_squares(n);
            let prob = build_problem(&p).unwrap();
            let out = sos_feasibility(&prob, 50_000, 1e-10).unwrap();
            let Feasibility::Feasible { gram, .. } = out else {
                return Err(TestCaseError::fail(format!("undecided: {out:?}")));
            };
            let cert = extract_certificate(&gram, &prob.gram_basis).unwrap();
            prop_assert!(verify_certificate(&p, &cert, Mode::Float).unwrap());
        }
    }
}
