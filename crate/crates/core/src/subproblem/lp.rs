//! Dense two-phase primal simplex with Bland's rule.
//!
//! Sized for the epigraph LPs of the Frank-Wolfe subproblem: a few dozen
//! variables and rows. Rows are converted to equality form with slack,
//! surplus and (where needed) artificial columns; free variables are split.

use crate::error::{invalid, Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarBound {
    NonNegative,
    Free,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn le(coeffs: Vec<f64>, rhs: f64) -> Self {
        Self {
            coeffs,
            relation: Relation::Le,
            rhs,
        }
    }

    pub fn ge(coeffs: Vec<f64>, rhs: f64) -> Self {
        Self {
            coeffs,
            relation: Relation::Ge,
            rhs,
        }
    }

    pub fn eq(coeffs: Vec<f64>, rhs: f64) -> Self {
        Self {
            coeffs,
            relation: Relation::Eq,
            rhs,
        }
    }
}

/// `minimize costᵀx` subject to the constraints and per-variable bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub cost: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBound>,
}

impl LpProblem {
    pub fn new(cost: Vec<f64>, bounds: Vec<VarBound>) -> Self {
        Self {
            cost,
            constraints: Vec::new(),
            bounds,
        }
    }

    pub fn with(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    pub fn push(&mut self, c: Constraint) {
        self.constraints.push(c);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point (meaningful when optimal).
    pub x: Vec<f64>,
    pub objective: f64,
    /// Lagrange multipliers, one per constraint: `cost + Σ_i λ_i a_i` is the
    /// reduced-cost vector at the optimum, so `λ_i >= 0` on `<=` rows and
    /// `λ_i <= 0` on `>=` rows.
    pub multipliers: Vec<f64>,
}

impl LpSolution {
    fn status_only(status: LpStatus, n: usize, m: usize) -> Self {
        Self {
            status,
            x: vec![f64::NAN; n],
            objective: f64::NAN,
            multipliers: vec![f64::NAN; m],
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Column bookkeeping for the equality-form tableau.
#[derive(Debug, Clone, Copy)]
enum ColKind {
    /// (original variable, sign): `x_j = Σ sign * z`.
    Structural(usize, f64),
    Slack,
    Artificial,
}

struct Tableau {
    /// `rows + 1` rows; the last is the objective row (reduced costs, with
    /// `-objective` in the rhs slot).
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    kinds: Vec<ColKind>,
    rows: usize,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.t[r][self.cols]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let inv = 1.0 / self.t[pr][pc];
        for v in self.t[pr].iter_mut() {
            *v *= inv;
        }
        self.t[pr][pc] = 1.0;
        let pivot_row = self.t[pr].clone();
        for (r, row) in self.t.iter_mut().enumerate() {
            if r == pr {
                continue;
            }
            let f = row[pc];
            if f == 0.0 {
                continue;
            }
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            row[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    /// Loads `cost` (over tableau columns) into the objective row, priced out
    /// against the current basis.
    fn set_objective(&mut self, cost: &[f64]) {
        let obj = self.rows;
        for c in 0..=self.cols {
            self.t[obj][c] = if c < self.cols { cost[c] } else { 0.0 };
        }
        for r in 0..self.rows {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                for c in 0..=self.cols {
                    self.t[obj][c] -= cb * self.t[r][c];
                }
            }
        }
    }

    /// Runs Bland-rule pivots until optimal. Returns `false` when unbounded.
    fn optimize(&mut self, allowed: impl Fn(usize) -> bool) -> Result<bool> {
        let obj = self.rows;
        for _ in 0..MAX_PIVOTS {
            let entering = (0..self.cols).find(|&c| allowed(c) && self.t[obj][c] < -PIVOT_EPS);
            let Some(pc) = entering else {
                return Ok(true);
            };
            let mut best: Option<(f64, usize, usize)> = None;
            for r in 0..self.rows {
                let a = self.t[r][pc];
                if a > PIVOT_EPS {
                    let ratio = self.rhs(r) / a;
                    let better = match best {
                        None => true,
                        Some((br, _, bvar)) => {
                            ratio < br - PIVOT_EPS
                                || (ratio <= br + PIVOT_EPS && self.basis[r] < bvar)
                        }
                    };
                    if better {
                        best = Some((ratio, r, self.basis[r]));
                    }
                }
            }
            let Some((_, pr, _)) = best else {
                return Ok(false);
            };
            self.pivot(pr, pc);
            if !self.t[obj][self.cols].is_finite() {
                return Err(Error::SolverFailure {
                    reason: "simplex produced a non-finite objective".into(),
                    last_gap: f64::NAN,
                });
            }
        }
        Err(Error::SolverFailure {
            reason: format!("simplex exceeded {MAX_PIVOTS} pivots"),
            last_gap: f64::NAN,
        })
    }
}

pub fn simplex_solve(lp: &LpProblem) -> Result<LpSolution> {
    let n = lp.cost.len();
    if lp.bounds.len() != n {
        return Err(invalid(format!(
            "LP has {} costs but {} variable bounds",
            n,
            lp.bounds.len()
        )));
    }
    if let Some((i, c)) = lp
        .constraints
        .iter()
        .enumerate()
        .find(|(_, c)| c.coeffs.len() != n)
    {
        return Err(invalid(format!(
            "LP constraint {i} has {} coefficients, expected {n}",
            c.coeffs.len()
        )));
    }
    let finite = lp.cost.iter().all(|v| v.is_finite())
        && lp
            .constraints
            .iter()
            .all(|c| c.rhs.is_finite() && c.coeffs.iter().all(|v| v.is_finite()));
    if !finite {
        return Err(invalid("LP data must be finite"));
    }

    let m = lp.constraints.len();
    let mut kinds = Vec::new();
    for (j, b) in lp.bounds.iter().enumerate() {
        kinds.push(ColKind::Structural(j, 1.0));
        if *b == VarBound::Free {
            kinds.push(ColKind::Structural(j, -1.0));
        }
    }
    let n_struct = kinds.len();

    // Row signs make every rhs non-negative.
    let signs: Vec<f64> = lp
        .constraints
        .iter()
        .map(|c| if c.rhs < 0.0 { -1.0 } else { 1.0 })
        .collect();

    // Slack/surplus columns, then artificials where no +1 slack is available.
    let mut slack_col = vec![None; m];
    for (i, c) in lp.constraints.iter().enumerate() {
        if c.relation != Relation::Eq {
            slack_col[i] = Some(kinds.len());
            kinds.push(ColKind::Slack);
        }
    }
    let mut init_col = vec![0usize; m];
    for (i, c) in lp.constraints.iter().enumerate() {
        let slack_sign = match c.relation {
            Relation::Le => signs[i],
            Relation::Ge => -signs[i],
            Relation::Eq => 0.0,
        };
        if slack_sign > 0.0 {
            init_col[i] = slack_col[i].expect("inequality row has a slack");
        } else {
            init_col[i] = kinds.len();
            kinds.push(ColKind::Artificial);
        }
    }
    let cols = kinds.len();

    let mut t = vec![vec![0.0; cols + 1]; m + 1];
    for (i, c) in lp.constraints.iter().enumerate() {
        let s = signs[i];
        let row = &mut t[i];
        for (col, kind) in kinds.iter().enumerate().take(n_struct) {
            if let ColKind::Structural(j, sign) = *kind {
                row[col] = s * sign * c.coeffs[j];
            }
        }
        if let Some(sc) = slack_col[i] {
            row[sc] = match c.relation {
                Relation::Le => s,
                Relation::Ge => -s,
                Relation::Eq => 0.0,
            };
        }
        row[init_col[i]] = 1.0;
        row[cols] = s * c.rhs;
    }
    let mut tab = Tableau {
        t,
        basis: init_col.clone(),
        kinds: kinds.clone(),
        rows: m,
        cols,
    };

    let is_art = |c: usize| matches!(kinds[c], ColKind::Artificial);
    let scale = 1.0 + lp.constraints.iter().map(|c| c.rhs.abs()).fold(0.0, f64::max);

    if kinds.iter().any(|k| matches!(k, ColKind::Artificial)) {
        let phase1: Vec<f64> = (0..cols).map(|c| if is_art(c) { 1.0 } else { 0.0 }).collect();
        tab.set_objective(&phase1);
        tab.optimize(|_| true)?;
        let infeas = -tab.t[m][cols];
        if infeas > 1e-9 * scale {
            return Ok(LpSolution::status_only(LpStatus::Infeasible, n, m));
        }
        // drive zero-level artificials out of the basis where possible
        for r in 0..m {
            if is_art(tab.basis[r]) {
                if let Some(pc) = (0..cols).find(|&c| !is_art(c) && tab.t[r][c].abs() > 1e-9) {
                    tab.pivot(r, pc);
                }
            }
        }
    }

    let phase2: Vec<f64> = kinds
        .iter()
        .map(|k| match *k {
            ColKind::Structural(j, sign) => sign * lp.cost[j],
            _ => 0.0,
        })
        .collect();
    tab.set_objective(&phase2);
    if !tab.optimize(|c| !is_art(c))? {
        return Ok(LpSolution::status_only(LpStatus::Unbounded, n, m));
    }

    let mut x = vec![0.0; n];
    for r in 0..m {
        if let ColKind::Structural(j, sign) = tab.kinds[tab.basis[r]] {
            x[j] += sign * tab.rhs(r);
        }
    }
    // Standard-form duals y_i = c_Bᵀ B⁻¹ e_i, where B⁻¹ e_i is the tableau
    // column of row i's initial basic column.
    let multipliers = (0..m)
        .map(|i| {
            let col = init_col[i];
            let y: f64 = (0..m).map(|r| phase2[tab.basis[r]] * tab.t[r][col]).sum();
            -signs[i] * y
        })
        .collect();
    let objective = lp.cost.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective,
        multipliers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn epigraph_box_example() {
        // min t  s.t.  y1 <= t,  -1 <= y1, y2 <= 1;  vars (y1, y2, t)
        let lp = LpProblem::new(vec![0.0, 0.0, 1.0], vec![VarBound::Free; 3])
            .with(Constraint::le(vec![1.0, 0.0, -1.0], 0.0))
            .with(Constraint::le(vec![1.0, 0.0, 0.0], 1.0))
            .with(Constraint::ge(vec![1.0, 0.0, 0.0], -1.0))
            .with(Constraint::le(vec![0.0, 1.0, 0.0], 1.0))
            .with(Constraint::ge(vec![0.0, 1.0, 0.0], -1.0));
        let s = simplex_solve(&lp).unwrap();
        assert!(s.is_optimal());
        assert_relative_eq!(s.objective, -1.0, epsilon = 1e-12);
        assert_relative_eq!(s.x[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(s.multipliers[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn infeasible_rows() {
        let lp = LpProblem::new(vec![1.0], vec![VarBound::Free])
            .with(Constraint::le(vec![1.0], 0.0))
            .with(Constraint::le(vec![-1.0], -1.0));
        assert_eq!(simplex_solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_problem() {
        let lp = LpProblem::new(vec![-1.0, 0.0], vec![VarBound::NonNegative; 2])
            .with(Constraint::le(vec![-1.0, 1.0], 1.0));
        assert_eq!(simplex_solve(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_rows_and_duals() {
        // min x + 2y  s.t.  x + y = 1, x, y >= 0  ⇒  x = 1, multiplier -1
        let lp = LpProblem::new(vec![1.0, 2.0], vec![VarBound::NonNegative; 2])
            .with(Constraint::eq(vec![1.0, 1.0], 1.0));
        let s = simplex_solve(&lp).unwrap();
        assert_relative_eq!(s.objective, 1.0, epsilon = 1e-12);
        assert_relative_eq!(s.x[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(s.multipliers[0], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_cycling_candidate_terminates() {
        // Beale's classic cycling example under the textbook rule.
        let lp = LpProblem::new(vec![-0.75, 150.0, -0.02, 6.0], vec![VarBound::NonNegative; 4])
            .with(Constraint::le(vec![0.25, -60.0, -0.04, 9.0], 0.0))
            .with(Constraint::le(vec![0.5, -90.0, -0.02, 3.0], 0.0))
            .with(Constraint::le(vec![0.0, 0.0, 1.0, 0.0], 1.0));
        let s = simplex_solve(&lp).unwrap();
        assert!(s.is_optimal());
        assert_relative_eq!(s.objective, -0.05, epsilon = 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let lp = LpProblem::new(vec![1.0, 1.0], vec![VarBound::Free; 2])
            .with(Constraint::le(vec![1.0], 1.0));
        assert!(matches!(simplex_solve(&lp), Err(Error::InvalidParameter(_))));
        let lp = LpProblem::new(vec![1.0, 1.0], vec![VarBound::Free]);
        assert!(simplex_solve(&lp).is_err());
    }

    proptest! {
        // Strong duality and complementary slackness on random bounded LPs
        // over a box: min cᵀx, Ax <= b, -1 <= x <= 1.
        #[test]
        fn optimal_solutions_are_feasible_and_certified(
            c in prop::collection::vec(-3.0..3.0f64, 3),
            a in prop::collection::vec(-2.0..2.0f64, 6),
            b in prop::collection::vec(0.1..2.0f64, 2),
        ) {
            let mut lp = LpProblem::new(c.clone(), vec![VarBound::Free; 3]);
            for r in 0..2 {
                lp.push(Constraint::le(a[r * 3..r * 3 + 3].to_vec(), b[r]));
            }
            for j in 0..3 {
                let mut e = vec![0.0; 3];
                e[j] = 1.0;
                lp.push(Constraint::le(e.clone(), 1.0));
                lp.push(Constraint::ge(e, -1.0));
            }
            let s = simplex_solve(&lp).unwrap();
            prop_assert!(s.is_optimal());
            for con in &lp.constraints {
                let lhs: f64 = con.coeffs.iter().zip(&s.x).map(|(a, x)| a * x).sum();
                match con.relation {
                    Relation::Le => prop_assert!(lhs <= con.rhs + 1e-8),
                    Relation::Ge => prop_assert!(lhs >= con.rhs - 1e-8),
                    Relation::Eq => prop_assert!((lhs - con.rhs).abs() <= 1e-8),
                }
            }
            // dual objective: -Σ λ_i b_i equals the primal optimum
            let dual: f64 = -lp.constraints.iter().zip(&s.multipliers).map(|(c, l)| c.rhs * l).sum::<f64>();
            prop_assert!((dual - s.objective).abs() <= 1e-8);
            // stationarity for free variables: c + Aᵀλ = 0
            for j in 0..3 {
                let r: f64 = c[j] + lp.constraints.iter().zip(&s.multipliers).map(|(con, l)| con.coeffs[j] * l).sum::<f64>();
                prop_assert!(r.abs() <= 1e-8);
            }
        }
    }
}
