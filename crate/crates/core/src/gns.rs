//! GNS representations of positive moment functionals and of functionals on
//! finite-dimensional *-algebras, plus the quadrature route back to atoms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::moments::{is_positive, moment_matrix, Atom, AtomicMeasure, MomentFunctional};
use crate::numeric::{cdot, hermitian_eig, least_squares, sym_eig, DenseMatrix};
use crate::poly::{monomials_up_to, Coefficient, Monomial, Polynomial};

/// Relative eigenvalue cutoff separating the quotient from the kernel of the seminorm.
pub const RANK_CUTOFF: f64 = 1e-9;
/// Minimum eigenvalue gap accepted by [`joint_diagonalize`].
pub const SPECTRAL_GAP: f64 = 1e-8;
/// Fresh combinations tried after the first one fails the gap test.
pub const DIAGONALIZE_RETRIES: usize = 8;
const COMMUTATOR_LIMIT: f64 = 1e-6;
const DEFAULT_SEED: u64 = 42;

/// Operator matrices of `π_ω(x_i)` on the quotient of the degree-`d` polynomials
/// by the kernel of `‖b‖² = ω(b* b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GnsRepresentation {
    pub arity: usize,
    pub degree: usize,
    pub quotient_dim: usize,
    /// Graded-lex monomials of degree `≤ degree`.
    pub basis: Vec<Monomial>,
    /// Column `k` of the change of basis: `quotient_dim` vectors over `basis`.
    pub basis_coeffs: Vec<Vec<f64>>,
    pub mult_matrices: Vec<DenseMatrix>,
    pub cyclic: Vec<f64>,
    pub flat: bool,
    /// Rank of the moment matrix one degree lower (degree 1 when `degree = 0`).
    pub comparison_rank: usize,
    pub adjoint_residuals: Vec<f64>,
    /// `‖M_i M_j − M_j M_i‖_max` for `i < j`, in lexicographic pair order.
    pub commutator_residuals: Vec<f64>,
    /// `‖Bᵀ M_d B − I‖_max`.
    pub gram_residual: f64,
}

impl GnsRepresentation {
    pub fn max_adjoint_residual(&self) -> f64 {
        self.adjoint_residuals.iter().fold(0.0, |m, &r| m.max(r))
    }

    pub fn max_commutator_residual(&self) -> f64 {
        self.commutator_residuals.iter().fold(0.0, |m, &r| m.max(r))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "arity": self.arity,
            "degree": self.degree,
            "quotient_dim": self.quotient_dim,
            "basis": self.basis.iter().map(|m| m.exps().to_vec()).collect::<Vec<_>>(),
            "basis_coeffs": self.basis_coeffs,
            "mult_matrices": self.mult_matrices.iter().map(DenseMatrix::to_rows).collect::<Vec<_>>(),
            "cyclic": self.cyclic,
            "flat": self.flat,
            "comparison_rank": self.comparison_rank,
            "adjoint_residuals": self.adjoint_residuals,
            "commutator_residuals": self.commutator_residuals,
            "gram_residual": self.gram_residual,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let arity = usize_field(v, "arity")?;
        let degree = usize_field(v, "degree")?;
        let r = usize_field(v, "quotient_dim")?;
        if crate::poly::monomial_count(arity, degree).is_none_or(|c| c > crate::moments::MAX_MOMENT_TABLE) {
            return Err(Error::parse("degree", "basis too large"));
        }
        let basis_raw = v
            .get("basis")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse("basis", "expected an array of exponent vectors"))?;
        let mut basis = Vec::with_capacity(basis_raw.len());
        for (k, b) in basis_raw.iter().enumerate() {
            let exps = crate::poly::parse_exps(Some(b), &format!("basis[{k}]"))?;
            if exps.len() != arity {
                return Err(Error::parse(
                    format!("basis[{k}]"),
                    "exponent length differs from arity",
                ));
            }
            basis.push(Monomial::new(exps));
        }
        if basis != monomials_up_to(arity, degree) {
            return Err(Error::parse("basis", "not the graded-lex basis of the stated degree"));
        }
        let basis_coeffs = vectors_field(v, "basis_coeffs")?;
        if basis_coeffs.len() != r || basis_coeffs.iter().any(|c| c.len() != basis.len()) {
            return Err(Error::parse(
                "basis_coeffs",
                "shape differs from quotient_dim × basis size",
            ));
        }
        let mats = v
            .get("mult_matrices")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse("mult_matrices", "expected an array of matrices"))?;
        if mats.len() != arity {
            return Err(Error::parse("mult_matrices", "one matrix per variable expected"));
        }
        let mut mult_matrices = Vec::with_capacity(arity);
        for (i, m) in mats.iter().enumerate() {
            let rows = vectors_field(&json!({ "m": m }), "m")
                .map_err(|_| Error::parse(format!("mult_matrices[{i}]"), "expected a matrix of numbers"))?;
            if rows.len() != r || rows.iter().any(|row| row.len() != r) {
                return Err(Error::parse(
                    format!("mult_matrices[{i}]"),
                    "matrix is not quotient_dim square",
                ));
            }
            mult_matrices.push(if r == 0 {
                DenseMatrix::zeros(0, 0)
            } else {
                DenseMatrix::from_rows(&rows)
            });
        }
        let cyclic = vector_field(v, "cyclic")?;
        if cyclic.len() != r {
            return Err(Error::parse("cyclic", "length differs from quotient_dim"));
        }
        let flat = v
            .get("flat")
            .and_then(Value::as_bool)
            .ok_or_else(|| Error::parse("flat", "expected a boolean"))?;
        let adjoint_residuals = vector_field(v, "adjoint_residuals")?;
        let commutator_residuals = vector_field(v, "commutator_residuals")?;
        let gram_residual = v
            .get("gram_residual")
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::parse("gram_residual", "expected a number"))?;
        Ok(Self {
            arity,
            degree,
            quotient_dim: r,
            basis,
            basis_coeffs,
            mult_matrices,
            cyclic,
            flat,
            comparison_rank: usize_field(v, "comparison_rank")?,
            adjoint_residuals,
            commutator_residuals,
            gram_residual,
        })
    }
}

fn usize_field(v: &Value, name: &str) -> Result<usize> {
    v.get(name)
        .and_then(Value::as_u64)
        .map(|x| x as usize)
        .ok_or_else(|| Error::parse(name, "expected a nonnegative integer"))
}

fn vector_field(v: &Value, name: &str) -> Result<Vec<f64>> {
    let arr = v
        .get(name)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse(name, "expected an array of numbers"))?;
    arr.iter()
        .enumerate()
        .map(|(k, x)| {
            x.as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::parse(format!("{name}[{k}]"), "expected a finite number"))
        })
        .collect()
}

fn vectors_field(v: &Value, name: &str) -> Result<Vec<Vec<f64>>> {
    let arr = v
        .get(name)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse(name, "expected an array of arrays"))?;
    arr.iter()
        .enumerate()
        .map(|(k, row)| {
            vector_field(&json!({ "row": row }), "row")
                .map_err(|_| Error::parse(format!("{name}[{k}]"), "expected an array of numbers"))
        })
        .collect()
}

fn rank_of(m: &DenseMatrix) -> Result<usize> {
    if m.rows() == 0 {
        return Ok(0);
    }
    Ok(sym_eig(m)?.rank(RANK_CUTOFF))
}

/// GNS construction truncated at degree `d`.
///
/// The quotient basis is `B = V_r Λ_r^{-1/2}` from the eigenvectors of the
/// degree-`d` moment matrix whose eigenvalues exceed `1e-9 · λ_max`. Each
/// `M_i = Bᵀ M^{(i)} B` with `M^{(i)}[α][β] = L(x^{α+β+e_i})` is the orthogonal
/// projection of multiplication by `x_i` onto the quotient, i.e. the least-squares
/// fit of `[x_i b]` in the orthonormal basis.
pub fn gns_build(l: &MomentFunctional, d: usize) -> Result<GnsRepresentation> {
    let needed = 2 * (d + 1);
    if needed > l.max_degree() {
        return Err(Error::DegreeHeadroomMissing {
            needed,
            available: l.max_degree(),
        });
    }
    if !l.is_hermitian() || !is_positive(l)? {
        return Err(Error::NotPositive);
    }
    let n = l.arity();
    let md = moment_matrix(l, d)?;
    let gram = md.real();
    let eig = sym_eig(&gram)?;
    let r = eig.rank(RANK_CUTOFF);
    if r == 0 {
        return Err(Error::NotPositive);
    }
    let size = md.size();
    let b = DenseMatrix::from_fn(size, r, |a, k| eig.vectors[(a, k)] / eig.values[k].sqrt());
    let bt = b.transpose();

    let gram_b = bt.matmul(&gram).matmul(&b);
    let gram_residual = gram_b.sub(&DenseMatrix::identity(r)).max_abs();

    let mult_matrices: Vec<DenseMatrix> = (0..n)
        .map(|i| {
            let shifted =
                DenseMatrix::from_fn(size, size, |a, c| l.get(&md.basis[a].mul(&md.basis[c]).times_var(i)).re);
            bt.matmul(&shifted).matmul(&b)
        })
        .collect();

    let e1: Vec<f64> = (0..size).map(|a| gram[(a, 0)]).collect();
    let cyclic = bt.matvec(&e1);

    let comparison_rank = if d == 0 {
        rank_of(&moment_matrix(l, 1)?.real())?
    } else {
        rank_of(&moment_matrix(l, d - 1)?.real())?
    };
    let flat = comparison_rank == r;

    let adjoint_residuals = mult_matrices.iter().map(|m| m.sub(&m.transpose()).max_abs()).collect();
    let mut commutator_residuals = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let a = mult_matrices[i].matmul(&mult_matrices[j]);
            let c = mult_matrices[j].matmul(&mult_matrices[i]);
            commutator_residuals.push(a.sub(&c).max_abs());
        }
    }

    Ok(GnsRepresentation {
        arity: n,
        degree: d,
        quotient_dim: r,
        basis: md.basis,
        basis_coeffs: (0..r).map(|k| b.column(k)).collect(),
        mult_matrices,
        cyclic,
        flat,
        comparison_rank,
        adjoint_residuals,
        commutator_residuals,
        gram_residual,
    })
}

/// Real and imaginary parts of `π(p) = Σ p_α Π_i M_i^{α_i}`.
fn apply_parts<C: Coefficient>(rep: &GnsRepresentation, p: &Polynomial<C>) -> Result<(DenseMatrix, DenseMatrix)> {
    if p.arity() != rep.arity {
        return Err(Error::ArityMismatch {
            expected: rep.arity,
            found: p.arity(),
        });
    }
    if !rep.flat {
        return Err(Error::NotFlat);
    }
    if p.degree() > rep.degree {
        return Err(Error::DegreeExceeded {
            degree: p.degree(),
            bound: rep.degree,
        });
    }
    let r = rep.quotient_dim;
    let mut powers: Vec<Vec<DenseMatrix>> = rep
        .mult_matrices
        .iter()
        .map(|m| vec![DenseMatrix::identity(r), m.clone()])
        .collect();
    let mut re = DenseMatrix::zeros(r, r);
    let mut im = DenseMatrix::zeros(r, r);
    for (mono, c) in p.terms() {
        let mut term = DenseMatrix::identity(r);
        for (i, &e) in mono.exps().iter().enumerate() {
            let e = e as usize;
            while powers[i].len() <= e {
                let next = powers[i].last().expect("seeded").matmul(&rep.mult_matrices[i]);
                powers[i].push(next);
            }
            if e > 0 {
                term = term.matmul(&powers[i][e]);
            }
        }
        let z = c.to_c64();
        re = re.add(&term.scale(z.re));
        im = im.add(&term.scale(z.im));
    }
    Ok((re, im))
}

/// `π(p)` on the quotient. Hermitian `p` gives a real matrix; otherwise the
/// result is the real `2r × 2r` embedding of the complex matrix.
pub fn gns_apply<C: Coefficient>(rep: &GnsRepresentation, p: &Polynomial<C>) -> Result<DenseMatrix> {
    let (re, im) = apply_parts(rep, p)?;
    if im.max_abs() == 0.0 {
        return Ok(re);
    }
    let r = rep.quotient_dim;
    let rows: Vec<Vec<Complex64>> = (0..r)
        .map(|i| (0..r).map(|j| Complex64::new(re[(i, j)], im[(i, j)])).collect())
        .collect();
    Ok(DenseMatrix::from_complex(&rows))
}

/// Largest normalized pairing error `|⟨c, π(p) c⟩ − L(p)| / (1 + |L(p)|)` over the samples.
pub fn gns_vector_state_check<C: Coefficient>(
    rep: &GnsRepresentation,
    l: &MomentFunctional,
    samples: &[Polynomial<C>],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for p in samples {
        let (re, im) = apply_parts(rep, p)?;
        let c = &rep.cyclic;
        let value = Complex64::new(
            crate::numeric::dot(c, &re.matvec(c)),
            crate::numeric::dot(c, &im.matvec(c)),
        );
        let target = crate::moments::evaluate(l, p)?;
        worst = worst.max((value - target).norm() / (1.0 + target.norm()));
    }
    Ok(worst)
}

/// Block-diagonal orthogonal sum of finitely many GNS representations of the
/// same polynomial algebra.
#[derive(Debug, Clone)]
pub struct GnsDirectSum {
    pub arity: usize,
    pub offsets: Vec<usize>,
    pub mult_matrices: Vec<DenseMatrix>,
    /// Cyclic vector of each summand, zero-padded to the total dimension.
    pub cyclic_vectors: Vec<Vec<f64>>,
    parts: Vec<GnsRepresentation>,
}

impl GnsDirectSum {
    pub fn new(parts: Vec<GnsRepresentation>) -> Result<Self> {
        let arity = parts.first().map_or(0, |p| p.arity);
        if let Some(bad) = parts.iter().find(|p| p.arity != arity) {
            return Err(Error::ArityMismatch {
                expected: arity,
                found: bad.arity,
            });
        }
        let mut offsets = Vec::with_capacity(parts.len());
        let mut total = 0;
        for p in &parts {
            offsets.push(total);
            total += p.quotient_dim;
        }
        let mult_matrices = (0..arity)
            .map(|i| {
                let mut m = DenseMatrix::zeros(total, total);
                for (p, &off) in parts.iter().zip(&offsets) {
                    let block = &p.mult_matrices[i];
                    for a in 0..p.quotient_dim {
                        for b in 0..p.quotient_dim {
                            m[(off + a, off + b)] = block[(a, b)];
                        }
                    }
                }
                m
            })
            .collect();
        let cyclic_vectors = parts
            .iter()
            .zip(&offsets)
            .map(|(p, &off)| {
                let mut v = vec![0.0; total];
                v[off..off + p.quotient_dim].copy_from_slice(&p.cyclic);
                v
            })
            .collect();
        Ok(Self {
            arity,
            offsets,
            mult_matrices,
            cyclic_vectors,
            parts,
        })
    }

    pub fn dim(&self) -> usize {
        self.parts.iter().map(|p| p.quotient_dim).sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `⊕_k π_k(p)` for Hermitian `p`.
    pub fn apply<C: Coefficient>(&self, p: &Polynomial<C>) -> Result<DenseMatrix> {
        if !p.is_hermitian() {
            return Err(Error::NotHermitian);
        }
        let n = self.dim();
        let mut out = DenseMatrix::zeros(n, n);
        for (part, &off) in self.parts.iter().zip(&self.offsets) {
            let (block, _) = apply_parts(part, p)?;
            for a in 0..part.quotient_dim {
                for b in 0..part.quotient_dim {
                    out[(off + a, off + b)] = block[(a, b)];
                }
            }
        }
        Ok(out)
    }

    /// `⟨c_k, π_tot(p) c_k⟩`, which recovers the `k`-th functional.
    pub fn vector_state<C: Coefficient>(&self, k: usize, p: &Polynomial<C>) -> Result<f64> {
        let c = self.cyclic_vectors.get(k).ok_or(Error::IndexOutOfRange {
            index: k,
            len: self.cyclic_vectors.len(),
        })?;
        let m = self.apply(p)?;
        Ok(crate::numeric::dot(c, &m.matvec(c)))
    }
}

/// Finite-dimensional unital *-algebra given by structure constants on a basis `e_1…e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteStarAlgebra {
    dim: usize,
    /// `e_i e_j = Σ_l c[i][j][l] e_l`.
    structure: Vec<Vec<Vec<Complex64>>>,
    /// Row `i` holds the coordinates of `e_i*`.
    involution: Vec<Vec<Complex64>>,
    unit: Vec<Complex64>,
}

const ALGEBRA_TOL: f64 = 1e-10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl FiniteStarAlgebra {
    pub fn new(
        structure: Vec<Vec<Vec<Complex64>>>,
        involution: Vec<Vec<Complex64>>,
        unit: Vec<Complex64>,
    ) -> Result<Self> {
        let k = unit.len();
        let bad = |reason: &str| Error::InvalidAlgebra {
            reason: reason.to_string(),
        };
        if k == 0 {
            return Err(bad("dimension must be positive"));
        }
        if structure.len() != k
            || structure
                .iter()
                .any(|row| row.len() != k || row.iter().any(|v| v.len() != k))
        {
            return Err(bad("structure constants must form a k×k×k tensor"));
        }
        if involution.len() != k || involution.iter().any(|row| row.len() != k) {
            return Err(bad("involution matrix must be k×k"));
        }
        let alg = Self {
            dim: k,
            structure,
            involution,
            unit,
        };
        let basis: Vec<Vec<Complex64>> = (0..k).map(|i| alg.basis_vector(i)).collect();
        for x in &basis {
            for y in &basis {
                let xy = alg.mul(x, y);
                for z in &basis {
                    if max_diff(&alg.mul(&xy, z), &alg.mul(x, &alg.mul(y, z))) > ALGEBRA_TOL {
                        return Err(bad("multiplication is not associative"));
                    }
                }
                if max_diff(&alg.star(&xy), &alg.mul(&alg.star(y), &alg.star(x))) > ALGEBRA_TOL {
                    return Err(bad("involution does not reverse products"));
                }
            }
            if max_diff(&alg.mul(&alg.unit, x), x) > ALGEBRA_TOL || max_diff(&alg.mul(x, &alg.unit), x) > ALGEBRA_TOL {
                return Err(bad("unit is not a two-sided identity"));
            }
            if max_diff(&alg.star(&alg.star(x)), x) > ALGEBRA_TOL {
                return Err(bad("involution is not involutive"));
            }
        }
        Ok(alg)
    }

    /// `ℂ` with its conjugation.
    pub fn scalars() -> Self {
        Self::diagonal(1)
    }

    /// `ℂ^k` with pointwise operations.
    pub fn diagonal(k: usize) -> Self {
        let structure = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| (0..k).map(|l| c((i == j && j == l) as u8 as f64)).collect())
                    .collect()
            })
            .collect();
        let involution = (0..k)
            .map(|i| (0..k).map(|j| c((i == j) as u8 as f64)).collect())
            .collect();
        Self {
            dim: k,
            structure,
            involution,
            unit: vec![c(1.0); k],
        }
    }

    /// `n × n` complex matrices on the matrix units `E_ab`, indexed `a·n + b`.
    pub fn matrix_algebra(n: usize) -> Self {
        let k = n * n;
        let mut structure = vec![vec![vec![c(0.0); k]; k]; k];
        let mut involution = vec![vec![c(0.0); k]; k];
        let mut unit = vec![c(0.0); k];
        for a in 0..n {
            unit[a * n + a] = c(1.0);
            for b in 0..n {
                involution[a * n + b][b * n + a] = c(1.0);
                for d in 0..n {
                    structure[a * n + b][b * n + d][a * n + d] = c(1.0);
                }
            }
        }
        Self {
            dim: k,
            structure,
            involution,
            unit,
        }
    }

    /// `A ⊕ B` on the concatenated basis.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (ka, kb) = (self.dim, other.dim);
        let k = ka + kb;
        let mut structure = vec![vec![vec![c(0.0); k]; k]; k];
        let mut involution = vec![vec![c(0.0); k]; k];
        for i in 0..ka {
            involution[i][..ka].copy_from_slice(&self.involution[i]);
            for j in 0..ka {
                structure[i][j][..ka].copy_from_slice(&self.structure[i][j]);
            }
        }
        for i in 0..kb {
            involution[ka + i][ka..].copy_from_slice(&other.involution[i]);
            for j in 0..kb {
                structure[ka + i][ka + j][ka..].copy_from_slice(&other.structure[i][j]);
            }
        }
        let mut unit = self.unit.clone();
        unit.extend_from_slice(&other.unit);
        Self {
            dim: k,
            structure,
            involution,
            unit,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit(&self) -> &[Complex64] {
        &self.unit
    }

    pub fn structure_constant(&self, i: usize, j: usize, l: usize) -> Complex64 {
        self.structure[i][j][l]
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Complex64> {
        (0..self.dim).map(|j| c((i == j) as u8 as f64)).collect()
    }

    pub fn mul(&self, x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![c(0.0); self.dim];
        for (i, xi) in x.iter().enumerate() {
            if *xi == c(0.0) {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if *yj == c(0.0) {
                    continue;
                }
                let s = xi * yj;
                for (o, cl) in out.iter_mut().zip(&self.structure[i][j]) {
                    *o += s * cl;
                }
            }
        }
        out
    }

    /// `x* = Σ conj(x_i) e_i*`.
    pub fn star(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![c(0.0); self.dim];
        for (xi, row) in x.iter().zip(&self.involution) {
            for (o, s) in out.iter_mut().zip(row) {
                *o += xi.conj() * s;
            }
        }
        out
    }
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

type CMatrix = Vec<Vec<Complex64>>;

fn cmat_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| (0..m).map(|j| (0..b.len()).map(|t| a[i][t] * b[t][j]).sum()).collect())
        .collect()
}

fn cmat_adjoint(a: &CMatrix) -> CMatrix {
    let n = a.len();
    let m = a.first().map_or(0, Vec::len);
    (0..m).map(|i| (0..n).map(|j| a[j][i].conj()).collect()).collect()
}

fn cmat_max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (ra, rb)| m.max(max_diff(ra, rb)))
}

fn cmat_combination(coeffs: &[Complex64], mats: &[CMatrix], r: usize) -> CMatrix {
    let mut out = vec![vec![c(0.0); r]; r];
    for (w, m) in coeffs.iter().zip(mats) {
        if *w == c(0.0) {
            continue;
        }
        for i in 0..r {
            for j in 0..r {
                out[i][j] += w * m[i][j];
            }
        }
    }
    out
}

/// GNS representation of a positive functional on a finite-dimensional *-algebra.
#[derive(Debug, Clone)]
pub struct FiniteGns {
    pub quotient_dim: usize,
    /// Orthonormal quotient vectors as coordinates over the algebra basis.
    pub basis_coeffs: Vec<Vec<Complex64>>,
    /// `π(e_i)` for every basis element, `quotient_dim × quotient_dim`.
    pub operators: Vec<CMatrix>,
    pub cyclic: Vec<Complex64>,
    /// `max ‖π(e_i)π(e_j) − Σ c_ijl π(e_l)‖`.
    pub representation_residual: f64,
    /// `max ‖π(e_i)^H − π(e_i*)‖`.
    pub adjoint_residual: f64,
    /// `max |⟨c, π(e_i) c⟩ − ω(e_i)|`.
    pub state_residual: f64,
    pub faithful: bool,
}

impl FiniteGns {
    pub fn to_json(&self) -> Value {
        let cm = |m: &CMatrix| -> Value {
            json!(m
                .iter()
                .map(|row| row.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
                .collect::<Vec<_>>())
        };
        json!({
            "quotient_dim": self.quotient_dim,
            "operators": self.operators.iter().map(cm).collect::<Vec<_>>(),
            "cyclic": self.cyclic.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "representation_residual": self.representation_residual,
            "adjoint_residual": self.adjoint_residual,
            "state_residual": self.state_residual,
            "faithful": self.faithful,
        })
    }
}

/// Quotients `A` by `{a : ω(a* a) = 0}` and represents each `e_i` by left multiplication.
pub fn gns_finite(alg: &FiniteStarAlgebra, omega: &[Complex64], tol: f64) -> Result<FiniteGns> {
    let k = alg.dim();
    if omega.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: omega.len(),
        });
    }
    let apply = |x: &[Complex64]| -> Complex64 { x.iter().zip(omega).map(|(a, w)| a * w).sum() };
    for i in 0..k {
        let ei = alg.basis_vector(i);
        if (apply(&alg.star(&ei)) - omega[i].conj()).norm() > tol {
            return Err(Error::NotHermitianFunctional);
        }
    }
    let stars: Vec<Vec<Complex64>> = (0..k).map(|i| alg.star(&alg.basis_vector(i))).collect();
    let gram: CMatrix = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| apply(&alg.mul(&stars[i], &alg.basis_vector(j))))
                .collect()
        })
        .collect();
    let eig = hermitian_eig(&DenseMatrix::from_complex(&gram))?;
    let top = eig.values.first().copied().unwrap_or(0.0);
    if eig.values.iter().any(|&v| v < -tol * top.max(1.0)) || top <= 0.0 {
        return Err(Error::NotPositive);
    }
    let r = eig.values.iter().filter(|&&v| v > RANK_CUTOFF * top).count();
    let basis_coeffs: Vec<Vec<Complex64>> = (0..r)
        .map(|p| eig.vectors[p].iter().map(|z| z / eig.values[p].sqrt()).collect())
        .collect();
    let gram_apply = |x: &[Complex64]| -> Vec<Complex64> {
        gram.iter()
            .map(|row| row.iter().zip(x).map(|(g, v)| g * v).sum())
            .collect()
    };
    let inner = |u: &[Complex64], v: &[Complex64]| cdot(u, &gram_apply(v));

    let operators: Vec<CMatrix> = (0..k)
        .map(|i| {
            let ei = alg.basis_vector(i);
            let images: Vec<Vec<Complex64>> = basis_coeffs.iter().map(|u| alg.mul(&ei, u)).collect();
            (0..r)
                .map(|p| (0..r).map(|q| inner(&basis_coeffs[p], &images[q])).collect())
                .collect()
        })
        .collect();
    let unit = alg.unit().to_vec();
    let cyclic: Vec<Complex64> = basis_coeffs.iter().map(|u| inner(u, &unit)).collect();

    let mut representation_residual = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            let lhs = cmat_mul(&operators[i], &operators[j]);
            let coeffs: Vec<Complex64> = (0..k).map(|l| alg.structure_constant(i, j, l)).collect();
            let rhs = cmat_combination(&coeffs, &operators, r);
            representation_residual = representation_residual.max(cmat_max_diff(&lhs, &rhs));
        }
    }
    let mut adjoint_residual = 0.0f64;
    let mut state_residual = 0.0f64;
    for i in 0..k {
        let image = cmat_combination(&stars[i], &operators, r);
        adjoint_residual = adjoint_residual.max(cmat_max_diff(&cmat_adjoint(&operators[i]), &image));
        let pc: Vec<Complex64> = operators[i]
            .iter()
            .map(|row| row.iter().zip(&cyclic).map(|(a, b)| a * b).sum())
            .collect();
        state_residual = state_residual.max((cdot(&cyclic, &pc) - omega[i]).norm());
    }

    let overlap: CMatrix = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    operators[i]
                        .iter()
                        .flatten()
                        .zip(operators[j].iter().flatten())
                        .map(|(a, b)| a.conj() * b)
                        .sum()
                })
                .collect()
        })
        .collect();
    let ov = hermitian_eig(&DenseMatrix::from_complex(&overlap))?;
    let ov_top = ov.values.first().copied().unwrap_or(0.0);
    let faithful = ov_top > 0.0 && ov.values.iter().filter(|&&v| v > RANK_CUTOFF * ov_top).count() == k;

    Ok(FiniteGns {
        quotient_dim: r,
        basis_coeffs,
        operators,
        cyclic,
        representation_residual,
        adjoint_residual,
        state_residual,
        faithful,
    })
}

/// Reads the atoms of a flat commutative representation from the joint
/// eigenvectors of its multiplication matrices, with the default seed.
pub fn joint_diagonalize(rep: &GnsRepresentation) -> Result<AtomicMeasure> {
    joint_diagonalize_seeded(rep, DEFAULT_SEED)
}

pub fn joint_diagonalize_seeded(rep: &GnsRepresentation, seed: u64) -> Result<AtomicMeasure> {
    if !rep.flat || rep.max_commutator_residual() > COMMUTATOR_LIMIT {
        return Err(Error::NotFlat);
    }
    let r = rep.quotient_dim;
    let n = rep.arity;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_gap = 0.0f64;
    let mut vectors = None;
    for _ in 0..=DIAGONALIZE_RETRIES {
        let mut dir: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = crate::numeric::norm2(&dir);
        if norm == 0.0 {
            continue;
        }
        dir.iter_mut().for_each(|x| *x /= norm);
        let mut mc = DenseMatrix::zeros(r, r);
        for (w, m) in dir.iter().zip(&rep.mult_matrices) {
            mc = mc.add(&m.scale(*w));
        }
        let e = sym_eig(&mc.symmetrized())?;
        let gap = e.values.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
        if gap >= SPECTRAL_GAP {
            vectors = Some(e);
            break;
        }
        best_gap = best_gap.max(gap);
    }
    let e = vectors.ok_or(Error::DegenerateSpectrum {
        gap: best_gap,
        retries: DIAGONALIZE_RETRIES,
    })?;

    let points: Vec<Vec<f64>> = (0..r)
        .map(|k| {
            let v = e.vector(k);
            rep.mult_matrices
                .iter()
                .map(|m| crate::numeric::dot(&v, &m.matvec(&v)))
                .collect()
        })
        .collect();

    let monos = monomials_up_to(n, rep.degree);
    let vander = DenseMatrix::from_fn(monos.len(), r, |a, k| monos[a].eval_real(&points[k]));
    let targets: Vec<f64> = monos
        .iter()
        .map(|m| {
            let p: Polynomial<Complex64> = Polynomial::term(m.clone(), c(1.0));
            let (re, _) = apply_parts(rep, &p)?;
            Ok(crate::numeric::dot(&rep.cyclic, &re.matvec(&rep.cyclic)))
        })
        .collect::<Result<_>>()?;
    let fit = least_squares(&vander, &targets)?;
    if fit.x.iter().any(|&w| w <= 0.0) {
        return Err(Error::NotPositive);
    }
    let mut atoms: Vec<Atom> = points
        .into_iter()
        .zip(fit.x)
        .map(|(point, weight)| Atom { point, weight })
        .collect();
    atoms.sort_by(|a, b| {
        a.point
            .iter()
            .zip(&b.point)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    AtomicMeasure::new(atoms)
}

/// `(p(x_1), …, p(x_K))` over the atoms of `m`.
pub fn gelfand_transform<C: Coefficient>(p: &Polynomial<C>, m: &AtomicMeasure) -> Result<Vec<Complex64>> {
    if p.arity() != m.arity() {
        return Err(Error::ArityMismatch {
            expected: m.arity(),
            found: p.arity(),
        });
    }
    Ok(m.atoms().iter().map(|a| p.eval_real(&a.point)).collect())
}

/// Finite Daniell test: if a decreasing sequence of nonnegative functions has
/// pointwise infimum `≤ tol` on every atom, its integrals must have infimum
/// `≤ tol · max(1, mass)`.
pub fn daniell_check<C: Coefficient>(m: &AtomicMeasure, sequence: &[Polynomial<C>], tol: f64) -> Result<bool> {
    let mut previous: Option<Vec<f64>> = None;
    let mut pointwise_inf = vec![f64::INFINITY; m.len()];
    let mut integral_inf = f64::INFINITY;
    for (step, f) in sequence.iter().enumerate() {
        let values = gelfand_transform(f, m)?;
        if values.iter().any(|z| z.im.abs() > tol) {
            return Err(Error::NotDecreasing { step });
        }
        let values: Vec<f64> = values.iter().map(|z| z.re).collect();
        if values.iter().any(|&v| v < -tol) {
            return Err(Error::NotDecreasing { step });
        }
        if let Some(prev) = &previous {
            if values.iter().zip(prev).any(|(v, p)| *v > p + tol) {
                return Err(Error::NotDecreasing { step });
            }
        }
        for (inf, v) in pointwise_inf.iter_mut().zip(&values) {
            *inf = inf.min(*v);
        }
        let integral: f64 = m.atoms().iter().zip(&values).map(|(a, v)| a.weight * v).sum();
        integral_inf = integral_inf.min(integral);
        previous = Some(values);
    }
    let premise = !sequence.is_empty() && pointwise_inf.iter().all(|&v| v <= tol);
    Ok(!premise || integral_inf <= tol * m.total_mass().max(1.0))
}
