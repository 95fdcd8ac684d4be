//! Dual certificates of non-membership: normalized moment functionals that are
//! nonnegative on every square of bounded degree yet negative on the target.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::{json, Value};

use super::solver::check_basis_size;
use crate::error::{Error, Result};
use crate::moments::{evaluate, moment_matrix, MomentFunctional};
use crate::numeric::{sym_eig, DenseMatrix, SymEig};
use crate::poly::{monomials_up_to, Coefficient, FloatPolynomial, Monomial, Polynomial};

/// The search stops early once `L(p) ≤ −WITNESS_DEPTH · (1 + max |p_γ|)`.
pub const WITNESS_DEPTH: f64 = 1e-2;
const BARRIER_GROWTH: f64 = 4.0;
const NEWTON_STEPS_PER_ROUND: usize = 50;
const MAX_BARRIER_WEIGHT: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct DualWitness {
    pub functional: MomentFunctional,
    /// `L(p)`.
    pub value: f64,
    /// Smallest eigenvalue of the degree-`d` moment matrix.
    pub min_eigenvalue: f64,
}

impl DualWitness {
    pub fn to_json(&self) -> Value {
        json!({
            "functional": self.functional.to_json(),
            "value": self.value,
            "min_eigenvalue": self.min_eigenvalue,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let functional = MomentFunctional::from_json_at(
            v.get("functional")
                .ok_or_else(|| Error::parse("functional", "missing"))?,
            "functional",
        )?;
        let num = |name: &str| {
            v.get(name)
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::parse(name, "expected a number"))
        };
        Ok(Self {
            functional,
            value: num("value")?,
            min_eigenvalue: num("min_eigenvalue")?,
        })
    }

    /// Re-derives the certificate against `p` from the stored functional.
    pub fn check<C: Coefficient>(&self, p: &Polynomial<C>, tol: f64) -> Result<bool> {
        let l = &self.functional;
        let value = evaluate(l, p)?.re;
        let mm = moment_matrix(l, l.half_degree())?;
        let min = sym_eig(&mm.real())?.min_value();
        Ok((l.mass().re - 1.0).abs() <= 1e-12 && value <= -tol && min >= -tol)
    }
}

#[derive(Debug, Clone)]
pub enum WitnessOutcome {
    Witness(DualWitness),
    NotFound { best_value: f64, iterations: usize },
}

/// `E[x^α]` for independent standard normal coordinates: `Π (α_i − 1)!!` over even exponents.
fn gaussian_moment(m: &Monomial) -> f64 {
    m.exps()
        .iter()
        .map(|&e| {
            if e % 2 == 1 {
                0.0
            } else {
                (1..e).step_by(2).map(f64::from).product::<f64>()
            }
        })
        .product()
}

struct Barrier {
    /// Moment monomials of degree `≤ 2d`; index 0 is the unit and stays fixed at 1.
    moments: Vec<Monomial>,
    /// `slot[a][b]` indexes `moments` at `basis[a]·basis[b]`.
    slot: Vec<Vec<usize>>,
    cost: Vec<f64>,
}

impl Barrier {
    fn matrix(&self, y: &[f64]) -> DenseMatrix {
        let n = self.slot.len();
        DenseMatrix::from_fn(n, n, |a, b| y[self.slot[a][b]])
    }

    fn objective(&self, y: &[f64]) -> f64 {
        self.cost.iter().zip(y).map(|(c, v)| c * v).sum()
    }

    /// `t·cᵀy − log det M(y)`, or `None` outside the open PSD cone.
    fn merit(&self, y: &[f64], t: f64) -> Result<Option<(f64, SymEig)>> {
        let e = sym_eig(&self.matrix(y))?;
        if e.min_value() <= 0.0 {
            return Ok(None);
        }
        let logdet: f64 = e.values.iter().map(|l| l.ln()).sum();
        Ok(Some((t * self.objective(y) - logdet, e)))
    }
}

/// Minimizes `L(p)` over normalized functionals with PSD degree-`d` moment
/// matrix by a log-det barrier method with damped Newton steps.
///
/// The start is the Gaussian moment sequence, whose moment matrix is positive
/// definite; every iterate stays strictly inside the cone, so a returned
/// witness has `L(q* q) > 0` for every nonzero `q` of degree `≤ d` up to rounding.
/// `max_iter` bounds the total number of Newton steps.
pub fn non_sos_witness<C: Coefficient>(p: &Polynomial<C>, max_iter: usize, tol: f64) -> Result<WitnessOutcome> {
    if !p.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let degree = p.degree();
    if degree % 2 == 1 {
        return Err(Error::OddDegree { degree });
    }
    let n = p.arity();
    let d = degree / 2;
    check_basis_size(n, d)?;
    let basis = monomials_up_to(n, d);
    let pf: FloatPolynomial = p.to_float();
    let moments = monomials_up_to(n, 2 * d);
    let index: BTreeMap<&Monomial, usize> = moments.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let slot = basis
        .iter()
        .map(|a| basis.iter().map(|b| index[&a.mul(b)]).collect())
        .collect();
    let cost: Vec<f64> = moments.iter().map(|m| pf.coeff(m).re).collect();
    let bar = Barrier { moments, slot, cost };
    let target = -(WITNESS_DEPTH * (1.0 + pf.max_coeff_magnitude())).max(tol);

    let mut y: Vec<f64> = bar.moments.iter().map(gaussian_moment).collect();
    let free = bar.moments.len() - 1;
    let mut t = 1.0;
    let mut iterations = 0;
    let mut best = bar.objective(&y);

    'rounds: while iterations < max_iter && t <= MAX_BARRIER_WEIGHT {
        for _ in 0..NEWTON_STEPS_PER_ROUND {
            if iterations >= max_iter {
                break 'rounds;
            }
            let Some((f0, e)) = bar.merit(&y, t)? else {
                break 'rounds;
            };
            let w = e.reconstruct_with(|l| 1.0 / l);
            let (grad, hess) = newton_system(&bar, &w, t, free);
            let step = solve_psd(&hess, &grad)?;
            let decrement: f64 = grad.iter().zip(&step).map(|(g, s)| g * s).sum();
            if decrement < 1e-12 {
                break;
            }
            let mut s = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let mut trial = y.clone();
                for (k, dk) in step.iter().enumerate() {
                    trial[k + 1] -= s * dk;
                }
                if let Some((f1, _)) = bar.merit(&trial, t)? {
                    if f1 <= f0 - 0.25 * s * decrement {
                        y = trial;
                        accepted = true;
                        break;
                    }
                }
                s *= 0.5;
            }
            iterations += 1;
            if !accepted {
                break;
            }
            best = best.min(bar.objective(&y));
            if bar.objective(&y) <= target {
                break 'rounds;
            }
        }
        t *= BARRIER_GROWTH;
    }

    let value = bar.objective(&y);
    let min_eigenvalue = sym_eig(&bar.matrix(&y))?.min_value();
    if value <= -tol && min_eigenvalue >= -tol {
        let map = bar
            .moments
            .iter()
            .zip(&y)
            .map(|(m, &v)| (m.clone(), Complex64::new(v, 0.0)))
            .collect();
        let functional = MomentFunctional::new(n, 2 * d, map)?;
        return Ok(WitnessOutcome::Witness(DualWitness {
            functional,
            value,
            min_eigenvalue,
        }));
    }
    Ok(WitnessOutcome::NotFound {
        best_value: best,
        iterations,
    })
}

/// Gradient and Hessian of the barrier merit in the free moments `y_1…`.
///
/// With `W = M⁻¹`: `g_γ = t c_γ − Σ_{slot(a,b)=γ} W_ab` and
/// `H_γδ = Σ_{slot(a,b)=γ, slot(c,e)=δ} W_bc W_ea`.
fn newton_system(bar: &Barrier, w: &DenseMatrix, t: f64, free: usize) -> (Vec<f64>, DenseMatrix) {
    let n = bar.slot.len();
    let mut grad: Vec<f64> = bar.cost[1..].iter().map(|c| t * c).collect();
    let mut hess = DenseMatrix::zeros(free, free);
    for a in 0..n {
        for b in 0..n {
            let g = bar.slot[a][b];
            if g == 0 {
                continue;
            }
            grad[g - 1] -= w[(a, b)];
            for c in 0..n {
                let wbc = w[(b, c)];
                for e in 0..n {
                    let h = bar.slot[c][e];
                    if h != 0 {
                        hess[(g - 1, h - 1)] += wbc * w[(e, a)];
                    }
                }
            }
        }
    }
    (grad, hess)
}

/// `H⁺ g` through the eigendecomposition, discarding directions below `1e-14 · λ_max`.
fn solve_psd(h: &DenseMatrix, g: &[f64]) -> Result<Vec<f64>> {
    let e = sym_eig(&h.symmetrized())?;
    let top = e.max_value();
    let mut out = vec![0.0; g.len()];
    for k in 0..g.len() {
        let l = e.values[k];
        if l <= 1e-14 * top {
            continue;
        }
        let v = e.vector(k);
        let coef: f64 = v.iter().zip(g).map(|(a, b)| a * b).sum::<f64>() / l;
        for (o, vi) in out.iter_mut().zip(&v) {
            *o += coef * vi;
        }
    }
    Ok(out)
}
