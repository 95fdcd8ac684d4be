//! Cyclic Jacobi eigensolver for dense symmetric matrices, plus Hermitian
//! matrices through their real embedding.

use num_complex::Complex64;

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const OFF_DIAGONAL_TOL: f64 = 1e-14;
const SWEEP_BUDGET: usize = 100;

/// `m = Q diag(values) Qᵀ`, values descending, eigenvectors in the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl SymEig {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k)
    }

    pub fn min_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `Σ f(λ_k) q_k q_kᵀ`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        let n = self.values.len();
        let mut out = DenseMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let qi = self.vectors[(i, k)] * w;
                if qi == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += qi * self.vectors[(j, k)];
                }
            }
        }
        out
    }

    /// Number of eigenvalues above `rel_tol · max|λ|`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0;
        }
        self.values.iter().filter(|&&v| v > rel_tol * scale).count()
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Converges when the off-diagonal Frobenius mass drops below
/// `1e-14 · ‖m‖_F`; gives up after 100 sweeps.
pub fn sym_eig(m: &DenseMatrix) -> Result<SymEig> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    let asym = m.asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    let n = m.rows();
    let mut a = m.symmetrized();
    let mut v = DenseMatrix::identity(n);
    let norm = a.frobenius_norm();
    let target = OFF_DIAGONAL_TOL * norm;

    let mut converged = norm == 0.0 || n <= 1;
    let mut sweeps = 0;
    while !converged {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        if sweeps == SWEEP_BUDGET {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(SymEig { values, vectors })
}

fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let n = a.rows();
    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// Eigendecomposition of a complex Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    /// Orthonormal complex eigenvectors, one per value.
    pub vectors: Vec<Vec<Complex64>>,
}

/// Hermitian eigendecomposition via the real `2m × 2m` embedding.
///
/// Each eigenvalue appears twice in the embedding. The complex vectors `u + iw`
/// read off the embedded eigenvectors are reduced to an orthonormal basis by
/// pivoted Gram–Schmidt, and each value is the Rayleigh quotient of its vector,
/// which is the average of the duplicated pair.
pub fn hermitian_eig(m: &DenseMatrix) -> Result<HermitianEig> {
    if !m.is_complex() {
        let e = sym_eig(m)?;
        let n = e.values.len();
        let vectors = (0..n)
            .map(|k| e.vector(k).into_iter().map(|x| Complex64::new(x, 0.0)).collect())
            .collect();
        return Ok(HermitianEig {
            values: e.values,
            vectors,
        });
    }
    let (n, _) = m.complex_dims();
    let e = sym_eig(m)?;
    let h = m.to_complex_rows();
    let mut candidates: Vec<Vec<Complex64>> = (0..2 * n)
        .map(|k| {
            let col = e.vector(k);
            (0..n).map(|i| Complex64::new(col[i], col[n + i])).collect()
        })
        .collect();
    let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while vectors.len() < n {
        let (best, norm) = candidates
            .iter()
            .enumerate()
            .map(|(k, z)| (k, cnorm(z)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("embedding has 2n eigenvectors");
        let mut u = candidates.swap_remove(best);
        for ui in u.iter_mut() {
            *ui /= norm;
        }
        for z in candidates.iter_mut() {
            let proj = cdot(&u, z);
            for (zi, ui) in z.iter_mut().zip(&u) {
                *zi -= proj * ui;
            }
        }
        vectors.push(u);
    }
    let mut pairs: Vec<(f64, Vec<Complex64>)> = vectors
        .into_iter()
        .map(|z| {
            let hz: Vec<Complex64> = h
                .iter()
                .map(|row| row.iter().zip(&z).map(|(a, b)| a * b).sum())
                .collect();
            (cdot(&z, &hz).re, z)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (values, vectors) = pairs.into_iter().unzip();
    Ok(HermitianEig { values, vectors })
}

/// `⟨a, b⟩ = Σ conj(a_i) b_i`.
pub fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn cnorm(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Nearest positive-semidefinite matrix in Frobenius norm (eigenvalue clipping at 0).
pub fn psd_project(m: &DenseMatrix) -> Result<DenseMatrix> {
    let e = sym_eig(m)?;
    Ok(e.reconstruct_with(|l| l.max(0.0)).symmetrized())
}
