use super::matrix::{norm2, DenseMatrix};
use crate::error::{Error, Result};

/// Relative rank cutoff shared by factorizations and moment matrices.
pub const RANK_TOL: f64 = 1e-9;
const NEGATIVE_PIVOT_TOL: f64 = 1e-8;

/// `Pᵀ m P = L D Lᵀ` with unit lower-triangular `L` and `(Pᵀ m P)_{ij} = m[perm[i]][perm[j]]`.
#[derive(Debug, Clone)]
pub struct Ldlt {
    pub l: DenseMatrix,
    pub d: Vec<f64>,
    pub perm: Vec<usize>,
    pub rank: usize,
}

impl Ldlt {
    /// `P L D Lᵀ Pᵀ`, which equals the factored matrix up to the dropped tail.
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.d.len();
        let ld = DenseMatrix::from_fn(n, n, |i, j| self.l[(i, j)] * self.d[j]);
        let pmp = ld.matmul(&self.l.transpose());
        let mut out = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(self.perm[i], self.perm[j])] = pmp[(i, j)];
            }
        }
        out
    }

    /// Solves `m x = b` on the leading `rank` pivots; the remaining coordinates are 0.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let r = self.rank;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..r {
            let s: f64 = (0..i).map(|k| self.l[(i, k)] * y[k]).sum();
            y[i] -= s;
        }
        for (i, yi) in y.iter_mut().enumerate().take(r) {
            *yi /= self.d[i];
        }
        for yi in y.iter_mut().skip(r) {
            *yi = 0.0;
        }
        for i in (0..r).rev() {
            let s: f64 = ((i + 1)..r).map(|k| self.l[(k, i)] * y[k]).sum();
            y[i] -= s;
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }
}

/// Diagonally pivoted `LDLᵀ` of a symmetric positive-semidefinite matrix.
///
/// Elimination stops once the largest remaining pivot is at most
/// `1e-9 · max pivot`; that tail is reported in `d` unchanged.
pub fn ldlt_pivoted(m: &DenseMatrix) -> Result<Ldlt> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    let n = m.rows();
    let mut a = m.symmetrized();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut l = DenseMatrix::identity(n);
    let mut d = vec![0.0; n];
    let max_diag = (0..n).fold(0.0f64, |mx, i| mx.max(a[(i, i)].abs()));
    let mut rank = 0;

    for k in 0..n {
        let (piv, pval) = (k..n)
            .map(|i| (i, a[(i, i)]))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty range");
        if pval < -NEGATIVE_PIVOT_TOL * max_diag.max(f64::MIN_POSITIVE) {
            return Err(Error::NotPsd { pivot: pval });
        }
        if pval <= RANK_TOL * max_diag || pval <= 0.0 {
            for i in k..n {
                d[i] = a[(i, i)];
            }
            break;
        }
        swap_symmetric(&mut a, k, piv);
        perm.swap(k, piv);
        for j in 0..k {
            let t = l[(k, j)];
            l[(k, j)] = l[(piv, j)];
            l[(piv, j)] = t;
        }
        d[k] = a[(k, k)];
        rank += 1;
        for i in (k + 1)..n {
            l[(i, k)] = a[(i, k)] / d[k];
        }
        for i in (k + 1)..n {
            for j in (k + 1)..=i {
                let v = a[(i, j)] - l[(i, k)] * d[k] * l[(j, k)];
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
    }
    Ok(Ldlt { l, d, perm, rank })
}

fn swap_symmetric(a: &mut DenseMatrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    let n = a.rows();
    for k in 0..n {
        let t = a[(i, k)];
        a[(i, k)] = a[(j, k)];
        a[(j, k)] = t;
    }
    for k in 0..n {
        let t = a[(k, i)];
        a[(k, i)] = a[(k, j)];
        a[(k, j)] = t;
    }
}

#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub x: Vec<f64>,
    pub residual: f64,
    pub rank: usize,
}

/// Minimizes `‖a x − b‖₂` through the normal equations `aᵀa x = aᵀb`, factored by
/// [`ldlt_pivoted`], with two rounds of iterative refinement.
pub fn least_squares(a: &DenseMatrix, b: &[f64]) -> Result<LeastSquares> {
    if a.rows() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: b.len(),
        });
    }
    let normal = a.transpose().matmul(a);
    let f = ldlt_pivoted(&normal)?;
    if f.rank < a.cols() {
        return Err(Error::RankDeficient {
            rank: f.rank,
            cols: a.cols(),
        });
    }
    let mut x = f.solve(&a.tr_matvec(b));
    for _ in 0..2 {
        let r: Vec<f64> = a.matvec(&x).iter().zip(b).map(|(ax, bi)| bi - ax).collect();
        let dx = f.solve(&a.tr_matvec(&r));
        for (xi, di) in x.iter_mut().zip(dx) {
            *xi += di;
        }
    }
    let r: Vec<f64> = a.matvec(&x).iter().zip(b).map(|(ax, bi)| ax - bi).collect();
    Ok(LeastSquares {
        residual: norm2(&r),
        x,
        rank: f.rank,
    })
}

/// Gradient `aᵀ(ax − b)` of the least-squares objective (for checks).
pub fn normal_residual(a: &DenseMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    let r: Vec<f64> = a.matvec(x).iter().zip(b).map(|(ax, bi)| ax - bi).collect();
    a.tr_matvec(&r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DenseMatrix {
        DenseMatrix::from_fn(r, c, |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn identity_factors_trivially() {
        let f = ldlt_pivoted(&DenseMatrix::identity(4)).unwrap();
        assert_eq!(f.rank, 4);
        assert_eq!(f.d, vec![1.0; 4]);
        assert_eq!(f.l, DenseMatrix::identity(4));
    }

    #[test]
    fn rank_one_outer_product() {
        let v = [1.0, -2.0, 0.5];
        let m = DenseMatrix::from_fn(3, 3, |i, j| v[i] * v[j]);
        let f = ldlt_pivoted(&m).unwrap();
        assert_eq!(f.rank, 1);
        assert!(f.reconstruct().sub(&m).max_abs() < 1e-14);
    }

    #[test]
    fn random_gram_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2, 5, 9] {
            let a = random(&mut rng, n + 2, n);
            let g = a.transpose().matmul(&a);
            let f = ldlt_pivoted(&g).unwrap();
            assert_eq!(f.rank, n);
            assert!(f.reconstruct().sub(&g).frobenius_norm() <= 1e-9);
            assert!(f.d.windows(2).all(|w| w[0] >= w[1] - 1e-12));
        }
    }

    #[test]
    fn indefinite_input_is_rejected() {
        let m = DenseMatrix::diag(&[1.0, -1.0]);
        assert!(matches!(ldlt_pivoted(&m), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn square_and_overdetermined_systems() {
        let a = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        let s = least_squares(&a, &[3.0, 5.0]).unwrap();
        assert!((s.x[0] - 0.8).abs() < 1e-10 && (s.x[1] - 1.4).abs() < 1e-10);

        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]);
        let s = least_squares(&a, &[1.0, 2.0, 3.0]).unwrap();
        assert!(s.residual <= 1e-10);
    }

    #[test]
    fn gradient_vanishes_on_random_problem() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random(&mut rng, 6, 3);
        let b: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = least_squares(&a, &b).unwrap();
        let g = normal_residual(&a, &s.x, &b);
        assert!(g.iter().all(|v| v.abs() < 1e-8));
    }

    #[test]
    fn rank_deficiency_is_signalled() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]]);
        assert_eq!(
            least_squares(&a, &[1.0, 2.0, 3.0]).unwrap_err(),
            Error::RankDeficient { rank: 1, cols: 2 }
        );
    }
}
