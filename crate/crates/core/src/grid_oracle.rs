//! Brute-force grid oracle for the min-max subproblem on 2-D sets.
//!
//! Minimizes `max_j ⟨g_j, y − x⟩` over a `401 × 401` grid of feasible points
//! covering the bounding box, then repeats on a `401 × 401` grid over a small
//! box around the best point found (`zoom_levels` times). Only membership
//! queries are used.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::numerics::{self, Matrix};
use crate::objectives::MultiObjective;
use crate::sets::FeasibleSet;
use crate::subproblem::solve_minmax;

pub const GRID_POINTS: usize = 401;
/// Half-width of a zoom box, in cells of the previous level.
const ZOOM_CELLS: f64 = 50.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub theta: f64,
    pub point: Vec<f64>,
    /// Cell width of the finest level.
    pub spacing: f64,
}

pub fn grid_oracle(g: &Matrix, x: &[f64], set: &FeasibleSet, zoom_levels: usize) -> Result<GridResult> {
    if set.dim() != 2 || g.cols() != 2 || x.len() != 2 {
        return Err(invalid("grid oracle supports 2-D problems only"));
    }
    let objective = |y: &[f64]| {
        let d = numerics::sub(y, x);
        g.row_iter()
            .map(|r| numerics::dot(r, &d))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut best = (objective(x), x.to_vec());
    let bbox = set.bounding_box();
    let mut lo = [bbox[0].0, bbox[1].0];
    let mut hi = [bbox[0].1, bbox[1].1];
    let mut spacing = 0.0;
    for _ in 0..=zoom_levels {
        let steps = (GRID_POINTS - 1) as f64;
        let hx = (hi[0] - lo[0]) / steps;
        let hy = (hi[1] - lo[1]) / steps;
        for i in 0..GRID_POINTS {
            for j in 0..GRID_POINTS {
                let y = [lo[0] + i as f64 * hx, lo[1] + j as f64 * hy];
                if set.contains(&y, 1e-12) {
                    let v = objective(&y);
                    if v < best.0 {
                        best = (v, y.to_vec());
                    }
                }
            }
        }
        spacing = hx.max(hy);
        let c = &best.1;
        lo = [c[0] - ZOOM_CELLS * hx, c[1] - ZOOM_CELLS * hy];
        hi = [c[0] + ZOOM_CELLS * hx, c[1] + ZOOM_CELLS * hy];
    }
    Ok(GridResult {
        theta: best.0,
        point: best.1,
        spacing,
    })
}

/// Outcome of comparing the subproblem solver with the grid oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub trials: usize,
    pub max_deviation: f64,
    /// Largest duality gap reported by the solver.
    pub max_duality_gap: f64,
    /// `(x, θ_solver, θ_grid)` of the worst trial.
    pub worst: Option<(Vec<f64>, f64, f64)>,
}

/// Random feasible point: the set's own sampler, else rejection sampling in
/// the bounding box.
pub fn random_feasible<R: Rng>(set: &FeasibleSet, rng: &mut R) -> Result<Vec<f64>> {
    if let Some(x) = set.sample(rng) {
        return Ok(x);
    }
    let bbox = set.bounding_box();
    for _ in 0..100_000 {
        let x: Vec<f64> = bbox
            .iter()
            .map(|(lo, hi)| if hi > lo { rng.random_range(*lo..*hi) } else { *lo })
            .collect();
        if set.contains(&x, 0.0) {
            return Ok(x);
        }
    }
    Err(invalid("could not sample a feasible point"))
}

/// Solves the subproblem at `trials` random feasible points with the
/// objective's gradients and compares against [`grid_oracle`].
pub fn oracle_check(
    f: &MultiObjective,
    set: &FeasibleSet,
    trials: usize,
    seed: u64,
    zoom_levels: usize,
    tol: f64,
) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OracleReport {
        trials,
        max_deviation: 0.0,
        max_duality_gap: 0.0,
        worst: None,
    };
    for _ in 0..trials {
        let x = random_feasible(set, &mut rng)?;
        let g = f.gradients(&x)?;
        let s = solve_minmax(&g, &x, set, tol)?;
        let grid = grid_oracle(&g, &x, set, zoom_levels)?;
        let dev = (s.theta_fw - grid.theta).abs();
        report.max_duality_gap = report.max_duality_gap.max(s.duality_gap);
        if report.worst.is_none() || dev > report.max_deviation {
            report.max_deviation = dev;
            report.worst = Some((x, s.theta_fw, grid.theta));
        }
    }
    Ok(report)
}
