//! Dense two-phase primal simplex with Bland's anti-cycling rule.

use super::matrix::{dot, DenseMatrix};
use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Goal {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// `x ≥ 0`.
    NonNegative,
    /// `x ∈ ℝ`.
    Free,
}

#[derive(Debug, Clone)]
pub struct LpProblem {
    pub goal: Goal,
    pub objective: Vec<f64>,
    pub a: DenseMatrix,
    pub rhs: Vec<f64>,
    pub senses: Vec<RowSense>,
    pub bounds: Vec<Bound>,
}

impl LpProblem {
    /// All variables nonnegative, no rows yet.
    pub fn new(goal: Goal, objective: Vec<f64>) -> Self {
        let n = objective.len();
        LpProblem {
            goal,
            objective,
            a: DenseMatrix::zeros(0, n),
            rhs: Vec::new(),
            senses: Vec::new(),
            bounds: vec![Bound::NonNegative; n],
        }
    }

    pub fn with_row(mut self, row: Vec<f64>, sense: RowSense, rhs: f64) -> Self {
        let mut rows = self.a.to_rows();
        rows.push(row);
        self.a = DenseMatrix::from_rows(&rows);
        self.senses.push(sense);
        self.rhs.push(rhs);
        self
    }

    pub fn with_bounds(mut self, bounds: Vec<Bound>) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        let checks = [
            (self.a.cols(), n),
            (self.bounds.len(), n),
            (self.a.rows(), self.rhs.len()),
            (self.senses.len(), self.rhs.len()),
        ];
        for (found, expected) in checks {
            if found != expected {
                return Err(Error::DimensionMismatch { expected, found });
            }
        }
        Ok(())
    }

    /// Largest violation of rows and bounds at `x`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.num_rows() {
            let ax = dot(self.a.row(i), x);
            let v = match self.senses[i] {
                RowSense::Le => ax - self.rhs[i],
                RowSense::Ge => self.rhs[i] - ax,
                RowSense::Eq => (ax - self.rhs[i]).abs(),
            };
            worst = worst.max(v);
        }
        for (xj, b) in x.iter().zip(&self.bounds) {
            if *b == Bound::NonNegative {
                worst = worst.max(-xj);
            }
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    /// `duals` solve the LP dual: `value = rhsᵀ·duals`, with sign conventions
    /// matching the row senses and objective direction.
    Optimal {
        x: Vec<f64>,
        value: f64,
        duals: Vec<f64>,
    },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LpOutcome::Optimal { .. })
    }
}

/// Checks that `y` is feasible for the dual of `p` within `tol`.
///
/// For minimization the dual is `max bᵀy` with `Aᵀy ≤ c` on nonnegative
/// columns, `Aᵀy = c` on free columns, `y ≤ 0` on `≤` rows and `y ≥ 0` on `≥` rows;
/// maximization flips every inequality.
pub fn dual_violation(p: &LpProblem, y: &[f64]) -> f64 {
    let flip = if p.goal == Goal::Maximize { -1.0 } else { 1.0 };
    let mut worst = 0.0f64;
    let aty = p.a.tr_matvec(y);
    for j in 0..p.num_vars() {
        let slack = flip * (p.objective[j] - aty[j]);
        worst = worst.max(match p.bounds[j] {
            Bound::NonNegative => -slack,
            Bound::Free => slack.abs(),
        });
    }
    for (yi, s) in y.iter().zip(&p.senses) {
        worst = worst.max(match s {
            RowSense::Le => flip * yi,
            RowSense::Ge => -flip * yi,
            RowSense::Eq => 0.0,
        });
    }
    worst
}

struct Tableau {
    /// `m` constraint rows followed by the objective row; last column is the rhs.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    m: usize,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.t[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Sets the objective row to `cost` reduced against the current basis.
    fn load_cost(&mut self, cost: &[f64]) {
        let m = self.m;
        let mut obj = vec![0.0; self.width + 1];
        obj[..cost.len()].copy_from_slice(cost);
        for i in 0..m {
            let cb = cost.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for (o, v) in obj.iter_mut().zip(&self.t[i]) {
                    *o -= cb * v;
                }
            }
        }
        self.t[m] = obj;
    }

    /// Bland's rule iterations over columns `< allowed`. Returns false when unbounded.
    fn run(&mut self, allowed: usize) -> bool {
        let m = self.m;
        let scale = 1.0 + self.t[m][..allowed].iter().fold(0.0f64, |a, v| a.max(v.abs()));
        loop {
            let Some(c) = (0..allowed).find(|&j| self.t[m][j] < -COST_TOL * scale) else {
                return true;
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.t[i][c];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                            if ratio < br && !tie || tie && self.basis[i] < self.basis[bi] {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

/// Solves `p` by the two-phase simplex method.
pub fn lp_solve(p: &LpProblem) -> Result<LpOutcome> {
    p.validate()?;
    let m = p.num_rows();
    let n = p.num_vars();

    // Standard form columns: one per nonnegative variable, two per free variable,
    // one slack per inequality row, then one artificial per row.
    let mut col_of = Vec::with_capacity(n);
    let mut ncols = 0;
    for b in &p.bounds {
        col_of.push(ncols);
        ncols += if *b == Bound::Free { 2 } else { 1 };
    }
    let mut slack_of = vec![None; m];
    for (i, s) in p.senses.iter().enumerate() {
        if *s != RowSense::Eq {
            slack_of[i] = Some(ncols);
            ncols += 1;
        }
    }
    let art0 = ncols;
    let width = ncols + m;

    let mut row_sign = vec![1.0; m];
    let mut t = vec![vec![0.0; width + 1]; m + 1];
    for i in 0..m {
        let row = &mut t[i];
        for j in 0..n {
            let a = p.a[(i, j)];
            row[col_of[j]] = a;
            if p.bounds[j] == Bound::Free {
                row[col_of[j] + 1] = -a;
            }
        }
        if let Some(s) = slack_of[i] {
            row[s] = if p.senses[i] == RowSense::Le { 1.0 } else { -1.0 };
        }
        row[width] = p.rhs[i];
        if p.rhs[i] < 0.0 {
            row_sign[i] = -1.0;
            for v in row.iter_mut() {
                *v = -*v;
            }
        }
        row[art0 + i] = 1.0;
    }
    let mut tab = Tableau {
        t,
        basis: (art0..art0 + m).collect(),
        m,
        width,
    };

    let mut phase1 = vec![0.0; width];
    for c in phase1.iter_mut().skip(art0) {
        *c = 1.0;
    }
    tab.load_cost(&phase1);
    tab.run(width);
    let infeas: f64 = (0..m).filter(|&i| tab.basis[i] >= art0).map(|i| tab.rhs(i).abs()).sum();
    let rhs_scale = 1.0 + p.rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if infeas > FEAS_TOL * rhs_scale {
        return Ok(LpOutcome::Infeasible);
    }
    for i in 0..m {
        if tab.basis[i] >= art0 {
            if let Some(c) = (0..art0).find(|&j| tab.t[i][j].abs() > 1e-9) {
                tab.pivot(i, c);
            }
        }
    }

    let sign = if p.goal == Goal::Maximize { -1.0 } else { 1.0 };
    let mut cost = vec![0.0; width];
    for j in 0..n {
        cost[col_of[j]] = sign * p.objective[j];
        if p.bounds[j] == Bound::Free {
            cost[col_of[j] + 1] = -sign * p.objective[j];
        }
    }
    tab.load_cost(&cost);
    if !tab.run(art0) {
        return Ok(LpOutcome::Unbounded);
    }

    let mut z = vec![0.0; width];
    for i in 0..m {
        z[tab.basis[i]] = tab.rhs(i);
    }
    let x: Vec<f64> = (0..n)
        .map(|j| {
            let v = z[col_of[j]];
            if p.bounds[j] == Bound::Free {
                v - z[col_of[j] + 1]
            } else {
                v
            }
        })
        .collect();

    // y_std = c_Bᵀ B⁻¹, and B⁻¹ sits in the artificial columns.
    let duals: Vec<f64> = (0..m)
        .map(|k| {
            let y: f64 = (0..m).map(|i| cost[tab.basis[i]] * tab.t[i][art0 + k]).sum();
            sign * row_sign[k] * y
        })
        .collect();
    let value = dot(&p.objective, &x);
    Ok(LpOutcome::Optimal { x, value, duals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_bound() {
        let p = LpProblem::new(Goal::Maximize, vec![1.0]).with_row(vec![1.0], RowSense::Le, 1.0);
        match lp_solve(&p).unwrap() {
            LpOutcome::Optimal { value, .. } => assert!((value - 1.0).abs() < 1e-12),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn infeasible_pair() {
        let p = LpProblem::new(Goal::Minimize, vec![0.0]).with_row(vec![1.0], RowSense::Le, -1.0);
        assert_eq!(lp_solve(&p).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let p = LpProblem::new(Goal::Maximize, vec![1.0, 1.0]).with_row(vec![1.0, -1.0], RowSense::Le, 1.0);
        assert_eq!(lp_solve(&p).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn free_variables_and_equalities() {
        // min |shift| type problem: min x s.t. x = -3, x free.
        let p = LpProblem::new(Goal::Minimize, vec![1.0])
            .with_row(vec![1.0], RowSense::Eq, -3.0)
            .with_bounds(vec![Bound::Free]);
        match lp_solve(&p).unwrap() {
            LpOutcome::Optimal { x, value, duals } => {
                assert!((x[0] + 3.0).abs() < 1e-12 && (value + 3.0).abs() < 1e-12);
                assert!(dual_violation(&p, &duals) < 1e-12);
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let mut p = LpProblem::new(Goal::Minimize, vec![1.0, 2.0]);
        p.bounds.pop();
        assert!(matches!(lp_solve(&p), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Classic cycling example for Dantzig's rule (Beale).
        let p = LpProblem::new(Goal::Minimize, vec![-0.75, 150.0, -0.02, 6.0])
            .with_row(vec![0.25, -60.0, -0.04, 9.0], RowSense::Le, 0.0)
            .with_row(vec![0.5, -90.0, -0.02, 3.0], RowSense::Le, 0.0)
            .with_row(vec![0.0, 0.0, 1.0, 0.0], RowSense::Le, 1.0);
        match lp_solve(&p).unwrap() {
            LpOutcome::Optimal { value, .. } => assert!((value + 0.05).abs() < 1e-9),
            o => panic!("{o:?}"),
        }
    }

    /// Enumerates every basic solution of `A x ≤ b, x ≥ 0` (n = 5 vars) by
    /// choosing 5 tight constraints out of the 8 + 5 candidates.
    fn brute_force_max(a: &DenseMatrix, b: &[f64], c: &[f64]) -> Option<f64> {
        let m = a.rows();
        let n = a.cols();
        let mut rows: Vec<(Vec<f64>, f64)> = (0..m).map(|i| (a.row(i).to_vec(), b[i])).collect();
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = -1.0;
            rows.push((e, 0.0));
        }
        let total = rows.len();
        let mut best: Option<f64> = None;
        let mut idx: Vec<usize> = (0..n).collect();
        loop {
            let sys = DenseMatrix::from_rows(&idx.iter().map(|&i| rows[i].0.clone()).collect::<Vec<_>>());
            let rhs: Vec<f64> = idx.iter().map(|&i| rows[i].1).collect();
            if let Ok(s) = super::super::factor::least_squares(&sys, &rhs) {
                if s.residual < 1e-9 {
                    let feasible = rows.iter().all(|(r, bi)| dot(r, &s.x) <= bi + 1e-7);
                    if feasible {
                        let v = dot(c, &s.x);
                        best = Some(best.map_or(v, |bv: f64| bv.max(v)));
                    }
                }
            }
            // next combination
            let mut k = n;
            while k > 0 && idx[k - 1] == total - n + k - 1 {
                k -= 1;
            }
            if k == 0 {
                return best;
            }
            idx[k - 1] += 1;
            for t in k..n {
                idx[t] = idx[t - 1] + 1;
            }
        }
    }

    #[test]
    fn matches_vertex_enumeration_and_duality() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..25 {
            // 8 rows, 5 variables; positive rows keep the polytope bounded.
            let a = DenseMatrix::from_fn(8, 5, |_, _| rng.gen_range(0.05..1.0));
            let b: Vec<f64> = (0..8).map(|_| rng.gen_range(0.5..2.0)).collect();
            let c: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut p = LpProblem::new(Goal::Maximize, c.clone());
            for i in 0..8 {
                p = p.with_row(a.row(i).to_vec(), RowSense::Le, b[i]);
            }
            let LpOutcome::Optimal { x, value, duals } = lp_solve(&p).unwrap() else {
                panic!("bounded feasible LP must be optimal");
            };
            assert!(p.violation(&x) <= 1e-9);
            let oracle = brute_force_max(&a, &b, &c).unwrap();
            assert!((value - oracle).abs() < 1e-8, "{value} vs {oracle}");
            assert!(dual_violation(&p, &duals) < 1e-9);
            assert!((dot(&b, &duals) - value).abs() < 1e-7);
        }
    }

    #[test]
    fn mixed_senses_duality() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut solved = 0;
        for _ in 0..60 {
            let x0: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..1.0)).collect();
            let a = DenseMatrix::from_fn(5, 4, |_, _| rng.gen_range(-1.0..1.0));
            let ax = a.matvec(&x0);
            let senses = [RowSense::Le, RowSense::Ge, RowSense::Eq, RowSense::Le, RowSense::Ge];
            let mut p = LpProblem::new(Goal::Minimize, (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect());
            for i in 0..5 {
                let slack = match senses[i] {
                    RowSense::Le => 0.3,
                    RowSense::Ge => -0.3,
                    RowSense::Eq => 0.0,
                };
                p = p.with_row(a.row(i).to_vec(), senses[i], ax[i] + slack);
            }
            p.bounds[1] = Bound::Free;
            if let LpOutcome::Optimal { x, value, duals } = lp_solve(&p).unwrap() {
                solved += 1;
                assert!(p.violation(&x) <= 1e-9);
                assert!(dual_violation(&p, &duals) < 1e-9);
                assert!((dot(&p.rhs, &duals) - value).abs() < 1e-7);
            }
        }
        assert!(solved > 5);
    }
}
