//! The Frank-Wolfe min-max subproblem
//!
//! ```text
//! θ(x) = min_{y ∈ X} max_j ⟨g_j, y − x⟩
//! ```
//!
//! plus the auxiliary quantities `θ̃` and the min-norm point of the gradient
//! hull. Polytopes (and ℓ1/ℓ∞ balls) go through an epigraph LP; other balls
//! are solved through the concave dual over the probability simplex.

pub mod lp;

use crate::error::{invalid, Error, Result};
use crate::numerics::{self, Matrix, PNorm};
use crate::sets::{FeasibleSet, HalfspacePolytope};
use lp::{simplex_solve, Constraint, LpProblem, LpStatus, VarBound};

/// Default duality-gap tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Iteration cap of the dual ascent.
pub const MAX_ASCENT_ITERS: usize = 100_000;

/// Solution of the min-max subproblem at `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxResult {
    pub p_fw: Vec<f64>,
    pub d_fw: Vec<f64>,
    /// `max_j ⟨g_j, d_fw⟩`, never positive.
    pub theta_fw: f64,
    /// Simplex weights of the dual certificate.
    pub lambda: Vec<f64>,
    /// Primal value minus dual value, `>= 0`.
    pub duality_gap: f64,
    /// `|theta_fw| <= tol`.
    pub stationary: bool,
}

/// Stateful solver that warm-starts the dual weights across calls.
#[derive(Debug, Clone)]
pub struct MinMaxSolver {
    tol: f64,
    max_iters: usize,
    warm: Option<Vec<f64>>,
}

impl Default for MinMaxSolver {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iters: MAX_ASCENT_ITERS,
            warm: None,
        }
    }
}

impl MinMaxSolver {
    pub fn new(tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(invalid(format!("subproblem tolerance {tol} must be > 0")));
        }
        Ok(Self {
            tol,
            ..Self::default()
        })
    }

    pub fn with_max_iters(mut self, n: usize) -> Self {
        self.max_iters = n.max(1);
        self
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn solve(&mut self, g: &Matrix, x: &[f64], set: &FeasibleSet) -> Result<MinMaxResult> {
        let n = set.dim();
        if g.rows() == 0 || g.cols() != n || x.len() != n {
            return Err(invalid(format!(
                "subproblem: gradients {}x{}, x of length {}, set of dimension {n}",
                g.rows(),
                g.cols(),
                x.len()
            )));
        }
        if !numerics::all_finite(x) {
            return Err(invalid("subproblem: x must be finite"));
        }
        let mut res = match set {
            FeasibleSet::Polytope(p) => solve_lp(g, x, p, set)?,
            FeasibleSet::Ball(b) if set.is_polytope() => {
                let poly = match b.p() {
                    PNorm::Infinity => {
                        let lo: Vec<f64> = b.center().iter().map(|c| c - b.radius()).collect();
                        let hi: Vec<f64> = b.center().iter().map(|c| c + b.radius()).collect();
                        HalfspacePolytope::axis_box(&lo, &hi)?
                    }
                    _ => HalfspacePolytope::l1_ball(b.radius(), b.center().to_vec())?,
                };
                solve_lp(g, x, &poly, set)?
            }
            FeasibleSet::Ball(_) => {
                let start = self
                    .warm
                    .as_ref()
                    .filter(|w| w.len() == g.rows())
                    .cloned();
                let r = solve_dual(g, x, set, self.tol, self.max_iters, start)?;
                self.warm = Some(r.lambda.clone());
                r
            }
        };
        res.stationary = res.theta_fw.abs() <= self.tol;
        Ok(res)
    }
}

/// One-shot solve with no warm start.
pub fn solve_minmax(g: &Matrix, x: &[f64], set: &FeasibleSet, tol: f64) -> Result<MinMaxResult> {
    MinMaxSolver::new(tol)?.solve(g, x, set)
}

fn primal_value(g: &Matrix, y: &[f64], x: &[f64]) -> f64 {
    let d = numerics::sub(y, x);
    g.row_iter()
        .map(|row| numerics::dot(row, &d))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn combine(g: &Matrix, lambda: &[f64]) -> Vec<f64> {
    g.tr_mul_vec(lambda)
}

/// `h(λ) = min_y ⟨g(λ), y − x⟩` together with the minimizer.
fn dual_value(g: &Matrix, lambda: &[f64], x: &[f64], set: &FeasibleSet) -> Result<(f64, Vec<f64>)> {
    let gl = combine(g, lambda);
    let r = set.lmo(&gl)?;
    Ok((r.value - numerics::dot(&gl, x), r.point))
}

fn finish(
    g: &Matrix,
    x: &[f64],
    mut y: Vec<f64>,
    lambda: Vec<f64>,
    dual: f64,
) -> MinMaxResult {
    let mut theta = primal_value(g, &y, x);
    if theta > 0.0 {
        y = x.to_vec();
        theta = 0.0;
    }
    let d = numerics::sub(&y, x);
    MinMaxResult {
        p_fw: y,
        d_fw: d,
        theta_fw: theta,
        lambda,
        duality_gap: (theta - dual).max(0.0),
        stationary: false,
    }
}

fn solve_lp(
    g: &Matrix,
    x: &[f64],
    poly: &HalfspacePolytope,
    set: &FeasibleSet,
) -> Result<MinMaxResult> {
    let (m, n) = (g.rows(), g.cols());
    let mut cost = vec![0.0; n + 1];
    cost[n] = 1.0;
    let mut lp = LpProblem::new(cost, vec![VarBound::Free; n + 1]);
    for row in g.row_iter() {
        let mut c = row.to_vec();
        c.push(-1.0);
        lp.push(Constraint::le(c, numerics::dot(row, x)));
    }
    let (a, b) = poly.constraints();
    for (row, rhs) in a.row_iter().zip(b) {
        let mut c = row.to_vec();
        c.push(0.0);
        lp.push(Constraint::le(c, *rhs));
    }
    let sol = simplex_solve(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::SolverFailure {
            reason: format!("epigraph LP returned {:?}", sol.status),
            last_gap: f64::NAN,
        });
    }
    let mut lambda: Vec<f64> = sol.multipliers[..m].iter().map(|v| v.max(0.0)).collect();
    let total: f64 = lambda.iter().sum();
    if total > 0.0 {
        lambda.iter_mut().for_each(|v| *v /= total);
    } else {
        lambda = vec![1.0 / m as f64; m];
    }
    let y = sol.x[..n].to_vec();
    let (dual, _) = dual_value(g, &lambda, x, set)?;
    Ok(finish(g, x, y, lambda, dual))
}

struct DualPoint {
    lambda: Vec<f64>,
    h: f64,
    y: Vec<f64>,
    /// `s_j = ⟨g_j, y − x⟩`, a supergradient of `h` at `λ`.
    s: Vec<f64>,
}

fn eval_dual(g: &Matrix, x: &[f64], set: &FeasibleSet, lambda: Vec<f64>) -> Result<DualPoint> {
    let (h, y) = dual_value(g, &lambda, x, set)?;
    let d = numerics::sub(&y, x);
    let s = g.row_iter().map(|row| numerics::dot(row, &d)).collect();
    Ok(DualPoint { lambda, h, y, s })
}

/// Pairwise exact line-search ascent on the simplex: move weight from the
/// supported coordinate with the smallest supergradient entry to the one
/// with the largest, with bisection on the sign of the directional
/// supergradient. For `m = 2` a single line search reaches the optimum.
fn solve_dual(
    g: &Matrix,
    x: &[f64],
    set: &FeasibleSet,
    tol: f64,
    max_iters: usize,
    start: Option<Vec<f64>>,
) -> Result<MinMaxResult> {
    let m = g.rows();
    if m == 1 {
        let p = eval_dual(g, x, set, vec![1.0])?;
        return Ok(finish(g, x, p.y, p.lambda, p.h));
    }
    let start = start.unwrap_or_else(|| vec![1.0 / m as f64; m]);
    let mut cur = eval_dual(g, x, set, start)?;
    let mut best_primal = (0.0, x.to_vec());
    let mut best_dual = (cur.h, cur.lambda.clone());
    let mut gap = f64::INFINITY;
    for _ in 0..max_iters {
        let pv = cur.s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if pv < best_primal.0 {
            best_primal = (pv, cur.y.clone());
        }
        if cur.h > best_dual.0 {
            best_dual = (cur.h, cur.lambda.clone());
        }
        gap = best_primal.0 - best_dual.0;
        if gap <= tol {
            break;
        }
        let up = (0..m)
            .max_by(|&a, &b| cur.s[a].total_cmp(&cur.s[b]).then(b.cmp(&a)))
            .unwrap();
        let down = (0..m)
            .filter(|&i| i != up && cur.lambda[i] > 0.0)
            .min_by(|&a, &b| cur.s[a].total_cmp(&cur.s[b]).then(a.cmp(&b)));
        let Some(down) = down else {
            break;
        };
        if cur.s[up] - cur.s[down] <= 0.0 {
            break;
        }
        cur = line_search(g, x, set, &cur, up, down)?;
    }
    if gap > tol {
        return Err(Error::SolverFailure {
            reason: format!("dual ascent did not reach the gap tolerance {tol:e}"),
            last_gap: gap,
        });
    }
    let (dual, lambda) = best_dual;
    let mut res = finish(g, x, best_primal.1, lambda, dual);
    res.duality_gap = (res.theta_fw - dual).max(0.0);
    Ok(res)
}

fn line_search(
    g: &Matrix,
    x: &[f64],
    set: &FeasibleSet,
    cur: &DualPoint,
    up: usize,
    down: usize,
) -> Result<DualPoint> {
    let at = |t: f64| {
        let mut l = cur.lambda.clone();
        l[up] += t;
        l[down] -= t;
        if t == cur.lambda[down] {
            l[down] = 0.0;
        }
        l
    };
    let t_max = cur.lambda[down];
    let end = eval_dual(g, x, set, at(t_max))?;
    if end.s[up] - end.s[down] >= 0.0 {
        return Ok(end);
    }
    let (mut lo, mut hi) = (0.0, t_max);
    let mut best = if end.h > cur.h { Some(end) } else { None };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let p = eval_dual(g, x, set, at(mid))?;
        if p.s[up] - p.s[down] > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if best.as_ref().is_none_or(|b| p.h >= b.h) {
            best = Some(p);
        }
    }
    match best {
        Some(p) if p.h >= cur.h => Ok(p),
        _ => eval_dual(g, x, set, at(lo)),
    }
}

/// Min-norm point of the convex hull of the rows of `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinNormPoint {
    pub g_star: Vec<f64>,
    pub lambda: Vec<f64>,
}

impl MinNormPoint {
    /// Steepest-descent direction `d^s = −g_star`.
    pub fn steepest_descent(&self) -> Vec<f64> {
        self.g_star.iter().map(|v| -v).collect()
    }

    pub fn norm(&self) -> f64 {
        numerics::norm2(&self.g_star)
    }
}

/// Wolfe's min-norm-point algorithm; closed-form segment projection for
/// `m = 2`.
pub fn min_norm_point(g: &Matrix) -> Result<MinNormPoint> {
    let m = g.rows();
    if m == 0 || g.cols() == 0 {
        return Err(invalid("min_norm_point needs at least one gradient"));
    }
    if m == 1 {
        return Ok(MinNormPoint {
            g_star: g.row(0).to_vec(),
            lambda: vec![1.0],
        });
    }
    if m == 2 {
        let (g1, g2) = (g.row(0), g.row(1));
        let diff = numerics::sub(g2, g1);
        let dd = numerics::dot(&diff, &diff);
        let w = if dd == 0.0 {
            0.5
        } else {
            (numerics::dot(g2, &diff) / dd).clamp(0.0, 1.0)
        };
        let lambda = vec![w, 1.0 - w];
        return Ok(MinNormPoint {
            g_star: combine(g, &lambda),
            lambda,
        });
    }
    Ok(wolfe(g))
}

fn wolfe(g: &Matrix) -> MinNormPoint {
    let m = g.rows();
    let scale = g
        .row_iter()
        .map(|r| numerics::dot(r, r))
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let eps = 1e-12;
    let first = (0..m)
        .min_by(|&a, &b| numerics::norm2(g.row(a)).total_cmp(&numerics::norm2(g.row(b))))
        .unwrap();
    let mut support = vec![first];
    let mut w = vec![1.0];
    let point = |support: &[usize], w: &[f64]| {
        let mut p = vec![0.0; g.cols()];
        for (i, wi) in support.iter().zip(w) {
            numerics::axpy(*wi, g.row(*i), &mut p);
        }
        p
    };
    let mut p = point(&support, &w);
    for _ in 0..(50 * m + 100) {
        let pp = numerics::dot(&p, &p);
        let (j, val) = (0..m)
            .map(|j| (j, numerics::dot(&p, g.row(j))))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if val >= pp - eps * scale || support.contains(&j) {
            break;
        }
        support.push(j);
        w.push(0.0);
        loop {
            let Some(v) = affine_min(g, &support) else {
                break;
            };
            if v.iter().all(|vi| *vi > eps) {
                w = v;
                break;
            }
            let mut step = 1.0_f64;
            for (wi, vi) in w.iter().zip(&v) {
                if *vi <= eps {
                    let denom = wi - vi;
                    if denom > 0.0 {
                        step = step.min(wi / denom);
                    }
                }
            }
            for (wi, vi) in w.iter_mut().zip(&v) {
                *wi += step * (vi - *wi);
            }
            let mut k = 0;
            while k < support.len() {
                if w[k] <= eps {
                    support.remove(k);
                    w.remove(k);
                } else {
                    k += 1;
                }
            }
            if support.len() <= 1 {
                w = vec![1.0; support.len()];
                break;
            }
        }
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= total);
        p = point(&support, &w);
    }
    let mut lambda = vec![0.0; m];
    for (i, wi) in support.iter().zip(&w) {
        lambda[*i] = *wi;
    }
    MinNormPoint { g_star: p, lambda }
}

/// Affine min-norm weights over `support`: solves
/// `[PᵀP 1; 1ᵀ 0][v; μ] = [0; 1]`.
fn affine_min(g: &Matrix, support: &[usize]) -> Option<Vec<f64>> {
    let k = support.len();
    let dim = k + 1;
    let mut a = vec![0.0; dim * (dim + 1)];
    let at = |r: usize, c: usize| r * (dim + 1) + c;
    for (r, &i) in support.iter().enumerate() {
        for (c, &j) in support.iter().enumerate() {
            a[at(r, c)] = numerics::dot(g.row(i), g.row(j));
        }
        a[at(r, k)] = 1.0;
        a[at(k, r)] = 1.0;
    }
    a[at(k, dim)] = 1.0;
    for col in 0..dim {
        let piv = (col..dim).max_by(|&x, &y| a[at(x, col)].abs().total_cmp(&a[at(y, col)].abs()))?;
        if a[at(piv, col)].abs() < 1e-14 {
            return None;
        }
        for c in 0..=dim {
            a.swap(at(col, c), at(piv, c));
        }
        for r in 0..dim {
            if r != col {
                let f = a[at(r, col)] / a[at(col, col)];
                if f != 0.0 {
                    for c in col..=dim {
                        a[at(r, c)] -= f * a[at(col, c)];
                    }
                }
            }
        }
    }
    Some((0..k).map(|r| a[at(r, dim)] / a[at(r, r)]).collect())
}

/// `θ̃ = min_{‖z‖₂ <= 1} max_j ⟨g_j, z⟩ = −min_{λ ∈ Δ} ‖Gᵀλ‖₂`.
pub fn theta_tilde(g: &Matrix) -> Result<(f64, Vec<f64>)> {
    let mnp = min_norm_point(g)?;
    Ok((-mnp.norm(), mnp.lambda))
}
