//! Finitely generated cones in `ℝ^m` and the ordered-vector-space queries built on them.
//!
//! A cone `V⁺ = cone(g_1, ..., g_k)` induces the order `v ≤ w ⇔ w − v ∈ V⁺`.
//! Membership, separation and decomposition are small linear programs; the
//! extreme rays of the dual cone come from an exact double description.

mod exact;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numeric::{dot, lp_solve, Goal, LpOutcome, LpProblem, RowSense};
use crate::poly::float_from_json;

const MEMBER_TOL: f64 = 1e-9;
const MAX_RAY_DIM: usize = 8;
const MAX_RAY_GENERATORS: usize = 32;
const GAUGE_LIMIT: f64 = 1e9;

#[derive(Debug, Clone, PartialEq)]
pub struct PolyhedralCone {
    dim: usize,
    generators: Vec<Vec<f64>>,
}

impl PolyhedralCone {
    /// Rejects zero, non-finite or wrongly sized generators.
    pub fn new(dim: usize, generators: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::parse("dim", "must be positive"));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: g.len(),
                });
            }
            if g.iter().any(|x| !x.is_finite()) {
                return Err(Error::parse(format!("generators[{i}]"), "entries must be finite"));
            }
            if g.iter().all(|&x| x == 0.0) {
                return Err(Error::parse(format!("generators[{i}]"), "generator is zero"));
            }
        }
        Ok(PolyhedralCone { dim, generators })
    }

    /// The positive orthant `ℝ^m_{≥0}`, generated by the unit vectors.
    pub fn orthant(dim: usize) -> Self {
        let generators = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        PolyhedralCone { dim, generators }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    fn check(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({"dim": self.dim, "generators": self.generators})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let dim = v
            .get("dim")
            .and_then(Value::as_u64)
            .filter(|&d| d > 0 && d <= 1000)
            .ok_or_else(|| Error::parse("dim", "expected a positive integer"))? as usize;
        let gens = v
            .get("generators")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse("generators", "expected an array of vectors"))?;
        let generators = gens
            .iter()
            .enumerate()
            .map(|(i, g)| parse_vector(g, &format!("generators[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, generators)
    }
}

/// Parses a JSON array of finite numbers.
pub fn parse_vector(v: &Value, field: &str) -> Result<Vec<f64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::parse(field, "expected an array of numbers"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| float_from_json(x, &format!("{field}[{i}]")))
        .collect()
}

/// Nonnegative coefficients `λ` minimizing `‖Σ λ_j g_j − v‖₁`, and that residual.
fn conic_fit(gens: &[Vec<f64>], v: &[f64]) -> Result<(Vec<f64>, f64)> {
    let m = v.len();
    let k = gens.len();
    let mut objective = vec![0.0; k];
    objective.extend(std::iter::repeat_n(1.0, 2 * m));
    let mut p = LpProblem::new(Goal::Minimize, objective);
    for i in 0..m {
        let mut row: Vec<f64> = gens.iter().map(|g| g[i]).collect();
        row.extend((0..m).map(|j| if i == j { 1.0 } else { 0.0 }));
        row.extend((0..m).map(|j| if i == j { -1.0 } else { 0.0 }));
        p = p.with_row(row, RowSense::Eq, v[i]);
    }
    match lp_solve(&p)? {
        LpOutcome::Optimal { x, value, .. } => Ok((x[..k].to_vec(), value)),
        // The slack columns make every instance feasible and bounded below.
        other => unreachable!("residual LP returned {other:?}"),
    }
}

fn member_tolerance(v: &[f64]) -> f64 {
    MEMBER_TOL * (1.0 + v.iter().fold(0.0f64, |a, x| a.max(x.abs())))
}

/// `v ∈ V⁺`, decided by a residual LP within `1e-9·(1 + ‖v‖∞)`.
pub fn cone_member(c: &PolyhedralCone, v: &[f64]) -> Result<bool> {
    c.check(v)?;
    if c.generators.is_empty() {
        return Ok(v.iter().all(|x| x.abs() <= member_tolerance(v)));
    }
    let (_, residual) = conic_fit(&c.generators, v)?;
    Ok(residual <= member_tolerance(v))
}

/// A functional `ω` with `⟨ω, g⟩ ≥ 0` on every generator and `⟨ω, v⟩ ≤ −1`.
///
/// Among all such functionals the one of least `ℓ¹` norm is returned.
pub fn separate(c: &PolyhedralCone, v: &[f64]) -> Result<Vec<f64>> {
    if cone_member(c, v)? {
        return Err(Error::IsMember);
    }
    let m = c.dim;
    // ω = u − w with u, w ≥ 0.
    let mut p = LpProblem::new(Goal::Minimize, vec![1.0; 2 * m]);
    let split = |a: &[f64]| -> Vec<f64> { a.iter().copied().chain(a.iter().map(|x| -x)).collect() };
    for g in &c.generators {
        p = p.with_row(split(g), RowSense::Ge, 0.0);
    }
    p = p.with_row(split(v), RowSense::Le, -1.0);
    match lp_solve(&p)? {
        LpOutcome::Optimal { x, .. } => Ok((0..m).map(|i| x[i] - x[m + i]).collect()),
        _ => Err(Error::IsMember),
    }
}

/// Unit-norm representatives of the extreme rays of `{ω : ⟨ω, g⟩ ≥ 0 ∀g}`.
///
/// The computation is exact on the rational values of the inputs. When the
/// generators do not span `ℝ^m` the dual cone contains the line space
/// `span(g)^⊥`; a basis `±ℓ` of it is appended, so the returned set still
/// generates the dual cone.
pub fn dual_extreme_rays(c: &PolyhedralCone) -> Result<Vec<Vec<f64>>> {
    if c.dim > MAX_RAY_DIM || c.generators.len() > MAX_RAY_GENERATORS {
        return Err(Error::DeskScaleExceeded {
            what: format!(
                "dual rays need dim ≤ {MAX_RAY_DIM} and ≤ {MAX_RAY_GENERATORS} generators, got {} and {}",
                c.dim,
                c.generators.len()
            ),
        });
    }
    let g: Vec<exact::IntVec> = c.generators.iter().map(|g| exact::integer_row(g)).collect();
    let span = exact::independent_rows(&g);
    let r = span.len();
    let mut out: Vec<Vec<f64>> = Vec::new();

    if r > 0 {
        // Coordinates z on span(g) through the independent generators: ω = Σ z_j g_{s_j}.
        let a: Vec<exact::IntVec> = g
            .iter()
            .map(|gi| span.iter().map(|&s| exact::dot(gi, &g[s])).collect())
            .collect();
        for z in exact::double_description(&a, r) {
            let omega: Vec<BigInt> = (0..c.dim)
                .map(|i| span.iter().zip(&z).map(|(&s, zj)| &g[s][i] * zj).sum())
                .collect();
            out.push(exact::to_unit_f64(&exact::primitive(&omega)));
        }
    }
    for l in exact::null_space(&g, c.dim) {
        let u = exact::to_unit_f64(&l);
        out.push(u.iter().map(|x| -x).collect());
        out.push(u);
    }
    out.sort_by(|a, b| {
        b.iter()
            .zip(a)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

/// Writes a dual-cone element as a nonnegative combination of [`dual_extreme_rays`].
///
/// Only terms with a positive coefficient are returned.
pub fn decompose_into_extremals(c: &PolyhedralCone, omega: &[f64]) -> Result<Vec<(f64, Vec<f64>)>> {
    c.check(omega)?;
    let scale = 1.0 + omega.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if c.generators
        .iter()
        .any(|g| dot(g, omega) < -MEMBER_TOL * scale * (1.0 + dot(g, g).sqrt()))
    {
        return Err(Error::NotInDualCone);
    }
    let rays = dual_extreme_rays(c)?;
    let (coeffs, _) = conic_fit(&rays, omega)?;
    Ok(coeffs
        .into_iter()
        .zip(rays)
        .filter(|(w, _)| *w > 1e-12 * scale)
        .collect())
}

/// `Σ w_k r_k`.
pub fn recombine(terms: &[(f64, Vec<f64>)], dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (w, r) in terms {
        for (o, x) in out.iter_mut().zip(r) {
            *o += w * x;
        }
    }
    out
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `[ℓ, u] = {v : ℓ ≤ v ≤ u}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderInterval {
    lower: Vec<f64>,
    upper: Vec<f64>,
    cone: PolyhedralCone,
}

impl OrderInterval {
    pub fn new(cone: PolyhedralCone, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        cone.check(&lower)?;
        cone.check(&upper)?;
        if !cone_member(&cone, &sub(&upper, &lower))? {
            return Err(Error::InvalidOrderData {
                reason: "upper − lower is not in the cone".into(),
            });
        }
        Ok(OrderInterval { lower, upper, cone })
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }
}

pub fn interval_member(i: &OrderInterval, v: &[f64]) -> Result<bool> {
    i.cone.check(v)?;
    Ok(cone_member(&i.cone, &sub(v, &i.lower))? && cone_member(&i.cone, &sub(&i.upper, v))?)
}

/// `U_δ = ⋃_N [−Σ_{k≤N} δ_k v̂_k, Σ_{k≤N} δ_k v̂_k]` for an increasing positive sequence `v̂`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaNeighborhood {
    cone: PolyhedralCone,
    dominating: Vec<Vec<f64>>,
    deltas: Vec<f64>,
}

impl DeltaNeighborhood {
    pub fn new(cone: PolyhedralCone, dominating: Vec<Vec<f64>>, deltas: Vec<f64>) -> Result<Self> {
        if dominating.len() != deltas.len() {
            return Err(Error::DimensionMismatch {
                expected: dominating.len(),
                found: deltas.len(),
            });
        }
        if let Some(k) = deltas.iter().position(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::InvalidOrderData {
                reason: format!("delta {k} is not a positive real"),
            });
        }
        for (k, vk) in dominating.iter().enumerate() {
            cone.check(vk)?;
            let step = if k == 0 {
                vk.clone()
            } else {
                sub(vk, &dominating[k - 1])
            };
            if !cone_member(&cone, &step)? {
                return Err(Error::InvalidOrderData {
                    reason: format!("dominating vector {k} breaks positivity or monotonicity"),
                });
            }
        }
        Ok(DeltaNeighborhood {
            cone,
            dominating,
            deltas,
        })
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    pub fn cone(&self) -> &PolyhedralCone {
        &self.cone
    }

    /// `Σ_{k≤n} δ_k v̂_k`.
    pub fn bound(&self, n: usize) -> Vec<f64> {
        let mut b = vec![0.0; self.cone.dim];
        for (vk, d) in self.dominating.iter().zip(&self.deltas).take(n) {
            for (bi, x) in b.iter_mut().zip(vk) {
                *bi += d * x;
            }
        }
        b
    }
}

/// Membership in the truncation at depth `n` (`1 ≤ n ≤ len`).
pub fn u_delta_member_at(u: &DeltaNeighborhood, v: &[f64], n: usize) -> Result<bool> {
    u.cone.check(v)?;
    if n == 0 || n > u.len() {
        return Err(Error::IndexOutOfRange { index: n, len: u.len() });
    }
    let b = u.bound(n);
    let plus: Vec<f64> = b.iter().zip(v).map(|(x, y)| x + y).collect();
    Ok(cone_member(&u.cone, &sub(&b, v))? && cone_member(&u.cone, &plus)?)
}

/// Membership in `U_δ` truncated at its full length; the intervals increase
/// with `N`, so only the deepest one needs testing.
pub fn u_delta_member(u: &DeltaNeighborhood, v: &[f64]) -> Result<bool> {
    if u.is_empty() {
        u.cone.check(v)?;
        return Ok(v.iter().all(|x| *x == 0.0));
    }
    u_delta_member_at(u, v, u.len())
}

/// Least `λ ≥ 0` with `λb ∓ v ∈ V⁺` for the deepest bound `b`, or `None` when no
/// such `λ` exists. Solved as one LP so absorption is not blurred by the
/// membership tolerance at large scales.
fn absorbing_scale(u: &DeltaNeighborhood, v: &[f64]) -> Result<Option<f64>> {
    let b = u.bound(u.len());
    let m = v.len();
    let k = u.cone.generators.len();
    // Variables: λ, μ (k), ν (k).  Rows: Gμ − λb = −v and Gν − λb = v.
    let mut objective = vec![0.0; 1 + 2 * k];
    objective[0] = 1.0;
    let mut p = LpProblem::new(Goal::Minimize, objective);
    for (sign, offset) in [(-1.0, 1), (1.0, 1 + k)] {
        for i in 0..m {
            let mut row = vec![0.0; 1 + 2 * k];
            row[0] = -b[i];
            for (j, g) in u.cone.generators.iter().enumerate() {
                row[offset + j] = g[i];
            }
            p = p.with_row(row, RowSense::Eq, sign * v[i]);
        }
    }
    Ok(match lp_solve(&p)? {
        LpOutcome::Optimal { value, .. } => Some(value),
        _ => None,
    })
}

/// `inf {λ > 0 : v/λ ∈ U_δ}` to absolute accuracy `tol`.
pub fn minkowski_gauge(u: &DeltaNeighborhood, v: &[f64], tol: f64) -> Result<f64> {
    u.cone.check(v)?;
    if v.iter().all(|x| *x == 0.0) {
        return Ok(0.0);
    }
    let inside = |lambda: f64| -> Result<bool> {
        let w: Vec<f64> = v.iter().map(|x| x / lambda).collect();
        u_delta_member(u, &w)
    };
    let Some(least) = absorbing_scale(u, v)? else {
        return Err(Error::NotAbsorbed);
    };
    if least > GAUGE_LIMIT {
        return Err(Error::NotAbsorbed);
    }
    let mut hi = 1.0;
    while !inside(hi)? {
        hi *= 2.0;
        if hi > GAUGE_LIMIT {
            hi = GAUGE_LIMIT;
            break;
        }
    }
    let mut lo = hi / 2.0;
    while lo > tol && inside(lo)? {
        hi = lo;
        lo /= 2.0;
    }
    if lo <= tol {
        lo = 0.0;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if inside(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
