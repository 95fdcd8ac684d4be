//! Exact integer/rational linear algebra and the double description method.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

pub(crate) type IntVec = Vec<BigInt>;

/// Exact image of a finite double, scaled row-wise to a primitive integer vector.
pub(crate) fn integer_row(v: &[f64]) -> IntVec {
    let q: Vec<BigRational> = v
        .iter()
        .map(|&x| BigRational::from_f64(x).expect("finite input"))
        .collect();
    primitive(&clear_denominators(&q))
}

fn clear_denominators(q: &[BigRational]) -> IntVec {
    let l = q.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    q.iter().map(|x| x.numer() * (&l / x.denom())).collect()
}

/// Divides by the gcd of the entries; the zero vector is returned unchanged.
pub(crate) fn primitive(v: &[BigInt]) -> IntVec {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

pub(crate) fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Converts to `f64` after dividing by the largest magnitude, so huge integers stay finite.
pub(crate) fn to_unit_f64(v: &[BigInt]) -> Vec<f64> {
    let max = v.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero);
    if max.is_zero() {
        return vec![0.0; v.len()];
    }
    let raw: Vec<f64> = v
        .iter()
        .map(|x| BigRational::new(x.clone(), max.clone()).to_f64().unwrap_or(0.0))
        .collect();
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    raw.iter().map(|x| x / norm).collect()
}

/// Reduced row echelon form over ℚ; returns the pivot columns.
fn rref(rows: &mut [Vec<BigRational>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, pv) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

fn to_rational(rows: &[IntVec]) -> Vec<Vec<BigRational>> {
    rows.iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect()
}

/// Indices of a maximal linearly independent subset of `rows`, chosen greedily in order.
pub(crate) fn independent_rows(rows: &[IntVec]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis: Vec<Vec<BigRational>> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut trial = basis.clone();
        trial.extend(to_rational(std::slice::from_ref(row)));
        let rank = rref(&mut trial.clone()).len();
        if rank > basis.len() {
            basis = trial;
            chosen.push(i);
        }
    }
    chosen
}

/// Integer basis of `{x : row·x = 0 for every row}`.
pub(crate) fn null_space(rows: &[IntVec], dim: usize) -> Vec<IntVec> {
    let mut m = to_rational(rows);
    if m.is_empty() {
        return (0..dim)
            .map(|i| (0..dim).map(|j| BigInt::from((i == j) as i32)).collect())
            .collect();
    }
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![BigRational::zero(); dim];
            x[f] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = -m[r][f].clone();
            }
            primitive(&clear_denominators(&x))
        })
        .collect()
}

/// Inverse of a square nonsingular integer matrix, as rational rows.
fn inverse(a: &[IntVec]) -> Vec<Vec<BigRational>> {
    let n = a.len();
    let mut aug: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<BigRational> = row.iter().map(|x| BigRational::from_integer(x.clone())).collect();
            r.extend((0..n).map(|j| BigRational::from_integer(BigInt::from((i == j) as i32))));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    assert!(pivots.len() == n && pivots[n - 1] == n - 1, "singular basis");
    aug.into_iter().map(|r| r[n..].to_vec()).collect()
}

struct Ray {
    v: IntVec,
    zeros: u64,
}

/// Extreme rays of the pointed cone `{z : a_i·z ≥ 0}` where the rows of `a`
/// have full column rank `r`. At most 64 constraints.
pub(crate) fn double_description(a: &[IntVec], r: usize) -> Vec<IntVec> {
    debug_assert!(a.len() <= 64);
    let basis_rows = independent_rows(a);
    debug_assert_eq!(basis_rows.len(), r);
    let ab: Vec<IntVec> = basis_rows.iter().map(|&i| a[i].clone()).collect();
    let inv = inverse(&ab);

    let mut processed: u64 = 0;
    for &i in &basis_rows {
        processed |= 1 << i;
    }
    let mut rays: Vec<Ray> = (0..r)
        .map(|j| {
            let col: Vec<BigRational> = (0..r).map(|i| inv[i][j].clone()).collect();
            let v = primitive(&clear_denominators(&col));
            let zeros = zero_set(a, &v, processed);
            Ray { v, zeros }
        })
        .collect();

    for i in 0..a.len() {
        if processed & (1 << i) != 0 {
            continue;
        }
        let bit = 1u64 << i;
        let s: Vec<BigInt> = rays.iter().map(|ray| dot(&a[i], &ray.v)).collect();
        let mut next: Vec<Ray> = Vec::new();
        for (k, ray) in rays.iter().enumerate() {
            if s[k].is_zero() {
                next.push(Ray {
                    v: ray.v.clone(),
                    zeros: ray.zeros | bit,
                });
            } else if s[k].is_positive() {
                next.push(Ray {
                    v: ray.v.clone(),
                    zeros: ray.zeros,
                });
            }
        }
        for p in (0..rays.len()).filter(|&k| s[k].is_positive()) {
            for n in (0..rays.len()).filter(|&k| s[k].is_negative()) {
                let common = rays[p].zeros & rays[n].zeros;
                if (common.count_ones() as usize) + 2 < r {
                    continue;
                }
                let blocked = rays
                    .iter()
                    .enumerate()
                    .any(|(t, ray)| t != p && t != n && ray.zeros & common == common);
                if blocked {
                    continue;
                }
                let v: IntVec = rays[n]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(nv, pv)| &s[p] * nv - &s[n] * pv)
                    .collect();
                next.push(Ray {
                    v: primitive(&v),
                    zeros: common | bit,
                });
            }
        }
        processed |= bit;
        rays = next;
    }
    rays.into_iter().map(|r| r.v).collect()
}

fn zero_set(a: &[IntVec], v: &[BigInt], mask: u64) -> u64 {
    let mut z = 0u64;
    for (i, row) in a.iter().enumerate() {
        if mask & (1 << i) != 0 && dot(row, v).is_zero() {
            z |= 1 << i;
        }
    }
    z
}
