//! Hermitian linear functionals on truncated polynomial algebras, given by moments.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numeric::{sym_eig, DenseMatrix};
use crate::poly::{
    float_from_json, hermitian_decompose, monomial_count, monomials_up_to, parse_exps, Coefficient, FloatPolynomial,
    Monomial, Polynomial,
};

/// Relative eigenvalue floor used by [`is_positive`].
pub const POSITIVITY_TOL: f64 = 1e-9;
/// Largest moment table accepted from JSON.
pub const MAX_MOMENT_TABLE: usize = 100_000;
const STATE_TOL: f64 = 1e-12;
const VARIANCE_CLIP: f64 = 1e-10;

/// `L(x^α)` for every monomial of total degree at most `max_degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentFunctional {
    arity: usize,
    max_degree: usize,
    moments: BTreeMap<Monomial, Complex64>,
}

impl MomentFunctional {
    /// Builds a functional from a complete moment table.
    ///
    /// Every monomial of degree `≤ max_degree` must be present; a gap is a
    /// [`Error::MissingMoment`], never an implicit zero.
    pub fn new(arity: usize, max_degree: usize, moments: BTreeMap<Monomial, Complex64>) -> Result<Self> {
        for m in moments.keys() {
            if m.arity() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    found: m.arity(),
                });
            }
            if m.total_degree() > max_degree {
                return Err(Error::DegreeExceeded {
                    degree: m.total_degree(),
                    bound: max_degree,
                });
            }
        }
        if let Some(missing) = monomials_up_to(arity, max_degree)
            .into_iter()
            .find(|m| !moments.contains_key(m))
        {
            return Err(Error::MissingMoment {
                exps: missing.exps().to_vec(),
            });
        }
        if let Some((m, _)) = moments.iter().find(|(_, z)| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::parse(format!("moments[{m}]"), "moment must be finite"));
        }
        Ok(MomentFunctional {
            arity,
            max_degree,
            moments,
        })
    }

    pub fn from_fn(arity: usize, max_degree: usize, f: impl Fn(&Monomial) -> Complex64) -> Self {
        let moments = monomials_up_to(arity, max_degree)
            .into_iter()
            .map(|m| {
                let v = f(&m);
                (m, v)
            })
            .collect();
        MomentFunctional {
            arity,
            max_degree,
            moments,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Largest `d` with `2d ≤ max_degree`.
    pub fn half_degree(&self) -> usize {
        self.max_degree / 2
    }

    pub fn moments(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.moments.iter()
    }

    /// `L(m)`; panics when `m` lies outside the table (callers check degrees first).
    pub fn get(&self, m: &Monomial) -> Complex64 {
        self.moments[m]
    }

    pub fn try_get(&self, m: &Monomial) -> Result<Complex64> {
        if m.arity() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: m.arity(),
            });
        }
        self.moments.get(m).copied().ok_or(Error::DegreeExceeded {
            degree: m.total_degree(),
            bound: self.max_degree,
        })
    }

    /// `L(1)`.
    pub fn mass(&self) -> Complex64 {
        self.get(&Monomial::one(self.arity))
    }

    /// Recomputed on every call: all moments real.
    pub fn is_hermitian(&self) -> bool {
        self.moments.values().all(|z| z.im == 0.0)
    }

    /// `a·self + b·other` on a shared table shape.
    pub fn combine(&self, a: f64, other: &MomentFunctional, b: f64) -> Result<MomentFunctional> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: other.arity,
            });
        }
        let deg = self.max_degree.min(other.max_degree);
        Ok(MomentFunctional::from_fn(self.arity, deg, |m| {
            self.get(m) * a + other.get(m) * b
        }))
    }

    /// Restriction to moments of degree `≤ degree`.
    pub fn truncate(&self, degree: usize) -> MomentFunctional {
        let deg = degree.min(self.max_degree);
        MomentFunctional::from_fn(self.arity, deg, |m| self.get(m))
    }

    pub fn to_json(&self) -> Value {
        let moments: Vec<Value> = self
            .moments
            .iter()
            .map(|(m, z)| json!({"exps": m.exps(), "re": z.re, "im": z.im}))
            .collect();
        json!({"arity": self.arity, "max_degree": self.max_degree, "moments": moments})
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
        let arity = v
            .get("arity")
            .and_then(Value::as_u64)
            .filter(|&a| a > 0 && a <= 16)
            .ok_or_else(|| Error::parse(field("arity"), "expected a positive integer"))? as usize;
        let max_degree = v
            .get("max_degree")
            .and_then(Value::as_u64)
            .filter(|&d| d <= 64)
            .ok_or_else(|| Error::parse(field("max_degree"), "expected a small nonnegative integer"))?
            as usize;
        if monomial_count(arity, max_degree).is_none_or(|c| c > MAX_MOMENT_TABLE) {
            return Err(Error::parse(
                field("max_degree"),
                format!("moment table exceeds {MAX_MOMENT_TABLE} entries"),
            ));
        }
        let entries = v
            .get("moments")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse(field("moments"), "expected an array"))?;
        let mut moments = BTreeMap::new();
        for (k, e) in entries.iter().enumerate() {
            let at = field(&format!("moments[{k}]"));
            let exps = parse_exps(e.get("exps"), &format!("{at}.exps"))?;
            if exps.len() != arity {
                return Err(Error::parse(
                    format!("{at}.exps"),
                    format!("expected {arity} exponents, found {}", exps.len()),
                ));
            }
            let re = float_from_json(
                e.get("re").ok_or_else(|| Error::parse(format!("{at}.re"), "missing"))?,
                &format!("{at}.re"),
            )?;
            let im = match e.get("im") {
                Some(x) => float_from_json(x, &format!("{at}.im"))?,
                None => 0.0,
            };
            if moments.insert(Monomial::new(exps), Complex64::new(re, im)).is_some() {
                return Err(Error::parse(format!("{at}.exps"), "duplicate monomial"));
            }
        }
        Self::new(arity, max_degree, moments)
    }
}

/// `⟨L, p⟩ = Σ_α p_α L(x^α)`.
pub fn evaluate<C: Coefficient>(l: &MomentFunctional, p: &Polynomial<C>) -> Result<Complex64> {
    if p.arity() != l.arity {
        return Err(Error::ArityMismatch {
            expected: l.arity,
            found: p.arity(),
        });
    }
    if p.degree() > l.max_degree {
        return Err(Error::DegreeExceeded {
            degree: p.degree(),
            bound: l.max_degree,
        });
    }
    Ok(p.terms().map(|(m, c)| c.to_c64() * l.get(m)).sum())
}

/// A point of `ℝ^n` with positive mass.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub point: Vec<f64>,
    pub weight: f64,
}

/// `μ = Σ_k w_k δ_{x_k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let dim = atoms.first().map(|a| a.point.len());
        for (k, a) in atoms.iter().enumerate() {
            if Some(a.point.len()) != dim || a.point.is_empty() {
                return Err(Error::parse(
                    format!("atoms[{k}].point"),
                    "points must share a positive dimension",
                ));
            }
            if !(a.weight.is_finite() && a.weight > 0.0) {
                return Err(Error::parse(format!("atoms[{k}].weight"), "weight must be positive"));
            }
            if a.point.iter().any(|x| !x.is_finite()) {
                return Err(Error::parse(format!("atoms[{k}].point"), "coordinates must be finite"));
            }
        }
        Ok(AtomicMeasure { atoms })
    }

    pub fn single(point: Vec<f64>) -> Result<Self> {
        Self::new(vec![Atom { point, weight: 1.0 }])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Dimension of the points; 0 for the empty measure.
    pub fn arity(&self) -> usize {
        self.atoms.first().map_or(0, |a| a.point.len())
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// `Σ_k w_k p(x_k)`.
    pub fn integrate<C: Coefficient>(&self, p: &Polynomial<C>) -> Complex64 {
        self.atoms.iter().map(|a| p.eval_real(&a.point) * a.weight).sum()
    }

    pub fn to_json(&self) -> Value {
        let atoms: Vec<Value> = self
            .atoms
            .iter()
            .map(|a| json!({"point": a.point, "weight": a.weight}))
            .collect();
        json!({"atoms": atoms})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let arr = v
            .get("atoms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse("atoms", "expected an array"))?;
        let mut atoms = Vec::with_capacity(arr.len());
        for (k, a) in arr.iter().enumerate() {
            let at = format!("atoms[{k}]");
            let point = a
                .get("point")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::parse(format!("{at}.point"), "expected an array"))?
                .iter()
                .enumerate()
                .map(|(i, x)| float_from_json(x, &format!("{at}.point[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            let weight = float_from_json(
                a.get("weight")
                    .ok_or_else(|| Error::parse(format!("{at}.weight"), "missing"))?,
                &format!("{at}.weight"),
            )?;
            atoms.push(Atom { point, weight });
        }
        Self::new(atoms)
    }
}

/// `L(x^α) = Σ_k w_k x_k^α` for `|α| ≤ degree`.
pub fn functional_from_atoms(m: &AtomicMeasure, degree: usize) -> MomentFunctional {
    MomentFunctional::from_fn(m.arity().max(1), degree, |mono| {
        let v: f64 = m.atoms.iter().map(|a| a.weight * mono.eval_real(&a.point)).sum();
        Complex64::new(v, 0.0)
    })
}

/// `M[α][β] = L(x^α x^β)` over the graded-lex basis of degree `≤ d`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrix {
    pub basis: Vec<Monomial>,
    pub entries: Vec<Vec<Complex64>>,
}

impl MomentMatrix {
    pub fn size(&self) -> usize {
        self.basis.len()
    }

    /// Real parts; this is the matrix itself for Hermitian functionals.
    pub fn real(&self) -> DenseMatrix {
        let n = self.size();
        DenseMatrix::from_fn(n, n, |i, j| self.entries[i][j].re)
    }
}

pub fn moment_matrix(l: &MomentFunctional, d: usize) -> Result<MomentMatrix> {
    if 2 * d > l.max_degree {
        return Err(Error::DegreeExceeded {
            degree: 2 * d,
            bound: l.max_degree,
        });
    }
    let basis = monomials_up_to(l.arity, d);
    let entries = basis
        .iter()
        .map(|a| basis.iter().map(|b| l.get(&a.mul(b))).collect())
        .collect();
    Ok(MomentMatrix { basis, entries })
}

/// Smallest and largest eigenvalue of the degree-`⌊max_degree/2⌋` moment matrix.
pub fn moment_spectrum_bounds(l: &MomentFunctional) -> Result<(f64, f64)> {
    if !l.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let e = sym_eig(&moment_matrix(l, l.half_degree())?.real())?;
    Ok((e.min_value(), e.max_value()))
}

/// Positivity on the cone of sums of squares: the moment matrix is PSD up to
/// `1e-9` relative to its largest eigenvalue.
pub fn is_positive(l: &MomentFunctional) -> Result<bool> {
    let (lo, hi) = moment_spectrum_bounds(l)?;
    Ok(lo >= -POSITIVITY_TOL * hi.abs())
}

/// `L / L(1)`; fails for `L(1) ≤ 0` since a positive functional with
/// `L(1) = 0` vanishes.
pub fn normalize_state(l: &MomentFunctional) -> Result<MomentFunctional> {
    let mass = l.mass();
    if mass.re <= 0.0 || mass.im != 0.0 {
        return Err(Error::NotState { value: mass.re });
    }
    Ok(MomentFunctional::from_fn(l.arity, l.max_degree, |m| l.get(m) / mass.re))
}

/// `L(b*b)·L(a*a) − |L(b*a)|²`, nonnegative for positive `L`.
pub fn cauchy_schwarz_residual<C: Coefficient>(
    l: &MomentFunctional,
    a: &Polynomial<C>,
    b: &Polynomial<C>,
) -> Result<f64> {
    let aa = evaluate(l, &a.hermitian_square())?;
    let bb = evaluate(l, &b.hermitian_square())?;
    let ba = evaluate(l, &b.star().try_mul(a)?)?;
    Ok(bb.re * aa.re - ba.norm_sqr())
}

/// Both forms of the variance of a state on `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variance {
    /// `L((a − L(a)1)*(a − L(a)1))`.
    pub definitional: f64,
    /// `L(a*a) − |L(a)|²`.
    pub alternative: f64,
}

impl Variance {
    /// The alternative form, with values in `[−1e-10, 0)` reported as 0.
    pub fn value(&self) -> f64 {
        if self.alternative < 0.0 && self.alternative >= -VARIANCE_CLIP {
            0.0
        } else {
            self.alternative
        }
    }

    pub fn discrepancy(&self) -> f64 {
        (self.definitional - self.alternative).abs()
    }
}

fn check_state(l: &MomentFunctional) -> Result<()> {
    let mass = l.mass();
    if (mass.re - 1.0).abs() > STATE_TOL || mass.im.abs() > STATE_TOL {
        return Err(Error::NotState { value: mass.re });
    }
    Ok(())
}

pub fn variance_report(l: &MomentFunctional, a: &FloatPolynomial) -> Result<Variance> {
    check_state(l)?;
    if a.degree() > l.half_degree() {
        return Err(Error::DegreeExceeded {
            degree: a.degree(),
            bound: l.half_degree(),
        });
    }
    let mean = evaluate(l, a)?;
    let centred = a - &FloatPolynomial::constant(a.arity(), mean);
    let definitional = evaluate(l, &centred.hermitian_square())?.re;
    let alternative = evaluate(l, &a.hermitian_square())?.re - mean.norm_sqr();
    Ok(Variance {
        definitional,
        alternative,
    })
}

/// `Var_L(a) = L(a*a) − |L(a)|²` for a state `L`.
pub fn variance(l: &MomentFunctional, a: &FloatPolynomial) -> Result<f64> {
    Ok(variance_report(l, a)?.value())
}

/// Vanishing variance on every generator `a` and on `1 + a²`.
///
/// Non-Hermitian generators are split as `a = a_r + i a_i` and both parts are
/// tested. A `true` answer certifies multiplicativity on the algebra the
/// generators span up to the available degree.
pub fn multiplicativity_test(l: &MomentFunctional, generators: &[FloatPolynomial], tol: f64) -> Result<bool> {
    check_state(l)?;
    let mut hermitian = Vec::new();
    for g in generators {
        if g.is_hermitian() {
            hermitian.push(g.clone());
        } else {
            let parts = hermitian_decompose(g);
            hermitian.push(parts.real_part);
            hermitian.push(parts.imag_part);
        }
    }
    for a in &hermitian {
        let shifted = &FloatPolynomial::one(a.arity()) + &a.hermitian_square();
        if shifted.degree() > l.half_degree() {
            return Err(Error::DegreeExceeded {
                degree: shifted.degree(),
                bound: l.half_degree(),
            });
        }
        if variance(l, &shifted)? > tol || variance(l, a)? > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn atoms(spec: &[(&[f64], f64)]) -> AtomicMeasure {
        AtomicMeasure::new(
            spec.iter()
                .map(|(p, w)| Atom {
                    point: p.to_vec(),
                    weight: *w,
                })
                .collect(),
        )
        .unwrap()
    }

    fn x(arity: usize, i: usize) -> FloatPolynomial {
        FloatPolynomial::var(arity, i)
    }

    fn random_measure(rng: &mut ChaCha8Rng, n: usize, k: usize) -> AtomicMeasure {
        AtomicMeasure::new(
            (0..k)
                .map(|_| Atom {
                    point: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                    weight: rng.gen_range(0.1..1.0),
                })
                .collect(),
        )
        .unwrap()
    }

    fn random_poly(rng: &mut ChaCha8Rng, n: usize, d: usize) -> FloatPolynomial {
        let terms = monomials_up_to(n, d)
            .into_iter()
            .map(|m| (m, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
        FloatPolynomial::from_terms(n, terms).unwrap()
    }

    #[test]
    fn evaluation_measure() {
        let l = functional_from_atoms(&atoms(&[(&[2.0], 1.0)]), 2);
        assert_eq!(evaluate(&l, &x(1, 0).pow(2)).unwrap(), Complex64::new(4.0, 0.0));
        assert_eq!(evaluate(&l, &FloatPolynomial::one(1)).unwrap(), l.mass());
        assert!(matches!(
            evaluate(&l, &x(1, 0).pow(3)),
            Err(Error::DegreeExceeded { .. })
        ));
        assert!(matches!(evaluate(&l, &x(2, 0)), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn hand_moment_sums() {
        let origin = functional_from_atoms(&atoms(&[(&[0.0, 0.0], 1.0)]), 2);
        for (m, v) in origin.moments() {
            assert_eq!(v.re, if m.is_one() { 1.0 } else { 0.0 });
        }
        let two = functional_from_atoms(&atoms(&[(&[0.0], 0.5), (&[2.0], 0.5)]), 2);
        let vals: Vec<f64> = two.moments().map(|(_, v)| v.re).collect();
        assert_eq!(vals, vec![1.0, 1.0, 2.0]);
    }

    #[test]
    fn moment_matrices_of_small_measures() {
        let l = functional_from_atoms(&atoms(&[(&[1.0], 1.0)]), 2);
        assert_eq!(
            moment_matrix(&l, 1).unwrap().real(),
            DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]])
        );
        let l = functional_from_atoms(&atoms(&[(&[0.0], 0.5), (&[1.0], 0.5)]), 2);
        assert_eq!(
            moment_matrix(&l, 1).unwrap().real(),
            DenseMatrix::from_rows(&[vec![1.0, 0.5], vec![0.5, 0.5]])
        );
        assert!(matches!(moment_matrix(&l, 2), Err(Error::DegreeExceeded { .. })));
    }

    #[test]
    fn missing_moments_are_errors() {
        let mut table = BTreeMap::new();
        table.insert(Monomial::new(vec![0]), Complex64::new(1.0, 0.0));
        table.insert(Monomial::new(vec![2]), Complex64::new(1.0, 0.0));
        assert_eq!(
            MomentFunctional::new(1, 2, table).unwrap_err(),
            Error::MissingMoment { exps: vec![1] }
        );
    }

    #[test]
    fn positivity() {
        let l = functional_from_atoms(&atoms(&[(&[0.3, -1.0], 0.4), (&[2.0, 0.5], 0.6)]), 4);
        assert!(is_positive(&l).unwrap());
        let bad = MomentFunctional::from_fn(1, 2, |m| Complex64::new([1.0, 0.0, -1.0][m.total_degree()], 0.0));
        assert!(!is_positive(&bad).unwrap());
        let complex = MomentFunctional::from_fn(1, 2, |_| Complex64::new(1.0, 1.0));
        assert_eq!(is_positive(&complex).unwrap_err(), Error::NotHermitian);
        assert!(!complex.is_hermitian() && l.is_hermitian());
    }

    #[test]
    fn perturbations_agree_with_eigenvalue_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..30 {
            let base = functional_from_atoms(&random_measure(&mut rng, 2, 2), 4);
            let eps: f64 = rng.gen_range(-0.05..0.05);
            let pert = MomentFunctional::from_fn(2, 4, |m| {
                base.get(m)
                    + if m.total_degree() == 4 && m.exps()[0] == 2 {
                        Complex64::new(eps, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
            });
            let e = sym_eig(&moment_matrix(&pert, 2).unwrap().real()).unwrap();
            let oracle = e.min_value() >= -POSITIVITY_TOL * e.max_value().abs();
            assert_eq!(is_positive(&pert).unwrap(), oracle);
        }
    }

    #[test]
    fn normalization() {
        let l = functional_from_atoms(&atoms(&[(&[1.0], 2.0)]), 2);
        assert_eq!(normalize_state(&l).unwrap().mass(), Complex64::new(1.0, 0.0));
        let zero = MomentFunctional::from_fn(1, 2, |_| Complex64::new(0.0, 0.0));
        assert!(matches!(normalize_state(&zero), Err(Error::NotState { .. })));
    }

    #[test]
    fn cauchy_schwarz_special_cases() {
        let l = functional_from_atoms(&atoms(&[(&[0.0], 0.5), (&[2.0], 0.5)]), 4);
        let a = &x(1, 0) + &FloatPolynomial::constant(1, Complex64::new(0.0, 2.0));
        assert!(cauchy_schwarz_residual(&l, &a, &a).unwrap().abs() < 1e-12);
        let r = cauchy_schwarz_residual(&l, &a, &FloatPolynomial::one(1)).unwrap();
        let direct =
            l.mass().re * evaluate(&l, &a.hermitian_square()).unwrap().re - evaluate(&l, &a).unwrap().norm_sqr();
        assert!((r - direct).abs() < 1e-12 && r >= 0.0);
    }

    #[test]
    fn variances() {
        let point = functional_from_atoms(&AtomicMeasure::single(vec![1.0, 2.0]).unwrap(), 2);
        assert!(variance(&point, &(&x(2, 0) + &x(2, 1))).unwrap().abs() <= 1e-12);
        let two = functional_from_atoms(&atoms(&[(&[0.0], 0.5), (&[2.0], 0.5)]), 2);
        assert!((variance(&two, &x(1, 0)).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(variance(&two, &FloatPolynomial::one(1)).unwrap(), 0.0);
        let heavy = functional_from_atoms(&atoms(&[(&[0.0], 2.0)]), 2);
        assert!(matches!(variance(&heavy, &x(1, 0)), Err(Error::NotState { .. })));
    }

    #[test]
    fn multiplicativity() {
        let gens = vec![x(2, 0), x(2, 1)];
        let point = functional_from_atoms(&AtomicMeasure::single(vec![0.5, -2.0]).unwrap(), 4);
        assert!(multiplicativity_test(&point, &gens, 1e-9).unwrap());
        let mix = functional_from_atoms(&atoms(&[(&[0.0, 1.0], 0.5), (&[2.0, 1.0], 0.5)]), 4);
        assert!(!multiplicativity_test(&mix, &gens, 1e-9).unwrap());
        // Same x-coordinate, different y: only the second generator sees the spread.
        let vertical = functional_from_atoms(&atoms(&[(&[1.0, 0.0], 0.5), (&[1.0, 3.0], 0.5)]), 4);
        assert!(multiplicativity_test(&vertical, &gens[..1], 1e-9).unwrap());
        assert!(!multiplicativity_test(&vertical, &gens, 1e-9).unwrap());
        assert!(matches!(
            multiplicativity_test(
                &functional_from_atoms(&AtomicMeasure::single(vec![0.0, 0.0]).unwrap(), 2),
                &gens,
                1e-9
            ),
            Err(Error::DegreeExceeded { .. })
        ));
    }

    #[test]
    fn json_round_trips() {
        let m = atoms(&[(&[0.125, -3.0], 0.25), (&[1.0, 2.0], 0.75)]);
        assert_eq!(AtomicMeasure::from_json(&m.to_json()).unwrap(), m);
        let l = functional_from_atoms(&m, 3);
        assert_eq!(MomentFunctional::from_json(&l.to_json()).unwrap(), l);
        let broken = json!({"arity": 1, "max_degree": 2, "moments": [{"exps": [0], "re": 1.0}]});
        assert!(matches!(
            MomentFunctional::from_json(&broken),
            Err(Error::MissingMoment { .. })
        ));
        assert!(AtomicMeasure::from_json(&json!({"atoms": [{"point": [1.0], "weight": -1.0}]})).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn atomic_pairing_matches_quadrature(seed in 0u64..100_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_measure(&mut rng, 2, 3);
            let l = functional_from_atoms(&m, 4);
            let p = random_poly(&mut rng, 2, 4);
            prop_assert!((evaluate(&l, &p).unwrap() - m.integrate(&p)).norm() < 1e-12);
            let e = sym_eig(&moment_matrix(&l, 2).unwrap().real()).unwrap();
            prop_assert!(e.min_value() >= -1e-10);
        }

        #[test]
        fn cauchy_schwarz_and_single_atom_variance(seed in 0u64..100_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_measure(&mut rng, 2, 3);
            let l = functional_from_atoms(&m, 4);
            let a = random_poly(&mut rng, 2, 2);
            let b = random_poly(&mut rng, 2, 2);
            prop_assert!(cauchy_schwarz_residual(&l, &a, &b).unwrap() >= -1e-8);
            let p = functional_from_atoms(&random_measure(&mut rng, 2, 1), 4);
            let p = normalize_state(&p).unwrap();
            prop_assert!(variance(&p, &a).unwrap().abs() <= 1e-10);
            let mean = p.moments().map(|(_, v)| v.re).sum::<f64>();
            prop_assert!(mean.is_finite());
            let s = normalize_state(&l).unwrap();
            prop_assert!(variance_report(&s, &a).unwrap().discrepancy() <= 1e-9);
        }

        #[test]
        fn mixture_variance_identity(seed in 0u64..100_000, lam in 0.0f64..1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r1 = normalize_state(&functional_from_atoms(&random_measure(&mut rng, 2, 2), 4)).unwrap();
            let r2 = normalize_state(&functional_from_atoms(&random_measure(&mut rng, 2, 2), 4)).unwrap();
            let a = random_poly(&mut rng, 2, 2);
            let mix = r1.combine(lam, &r2, 1.0 - lam).unwrap();
            let lhs = variance_report(&mix, &a).unwrap().alternative;
            let gap = (evaluate(&r1, &a).unwrap() - evaluate(&r2, &a).unwrap()).norm_sqr();
            let rhs = lam * variance_report(&r1, &a).unwrap().alternative
                + (1.0 - lam) * variance_report(&r2, &a).unwrap().alternative
                + lam * (1.0 - lam) * gap;
            prop_assert!((lhs - rhs).abs() <= 1e-9);
        }
    }
}
