use crate::error::{invalid, Error, Result};
use crate::objectives::MultiObjective;
use crate::sets::{FeasibleSet, DEFAULT_MEMBERSHIP_TOL};
use crate::solver::{self, RunConfig, StartPoint, Termination};
use crate::subproblem::solve_minmax;

/// Largest `|θ^FW(x*)|` accepted for a user-supplied limit point.
pub const ANALYTIC_STATIONARITY_TOL: f64 = 1e-8;
pub const DEFAULT_REFINE_TOL: f64 = 1e-13;
pub const MAX_REFINE_ITERS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Analytic,
    /// Last iterate of a run stopped at `|θ^FW| = achieved <= tol`.
    Refined { tol: f64, achieved: f64 },
    /// Last iterate of a run that stopped short of its target.
    Partial { target: f64, achieved: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePoint {
    pub x_star: Vec<f64>,
    pub f_star: Vec<f64>,
    pub provenance: Provenance,
    pub fingerprint: String,
}

impl ReferencePoint {
    /// Extra absolute slack for checks that depend on the reference.
    pub fn slack(&self) -> f64 {
        match self.provenance {
            Provenance::Analytic => 0.0,
            Provenance::Refined { achieved, .. } | Provenance::Partial { achieved, .. } => achieved,
        }
    }

    /// Reference built from the point carried by a partial-reference error.
    pub fn from_partial(f: &MultiObjective, set: &FeasibleSet, err: &Error) -> Option<Self> {
        let Error::PartialReference { achieved, target, x } = err else {
            return None;
        };
        Some(Self {
            f_star: f.evaluate(x).ok()?,
            x_star: x.clone(),
            provenance: Provenance::Partial {
                target: *target,
                achieved: *achieved,
            },
            fingerprint: solver::problem_fingerprint(f, set),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceMode {
    Analytic(Vec<f64>),
    Refine {
        tol: f64,
        x0: StartPoint,
        max_iters: usize,
    },
}

impl ReferenceMode {
    pub fn refine_from(x0: StartPoint) -> Self {
        ReferenceMode::Refine {
            tol: DEFAULT_REFINE_TOL,
            x0,
            max_iters: MAX_REFINE_ITERS,
        }
    }
}

pub fn compute_reference(
    f: &MultiObjective,
    set: &FeasibleSet,
    mode: &ReferenceMode,
) -> Result<ReferencePoint> {
    let fingerprint = solver::problem_fingerprint(f, set);
    match mode {
        ReferenceMode::Analytic(x) => {
            if x.len() != set.dim() || !set.contains(x, DEFAULT_MEMBERSHIP_TOL) {
                return Err(invalid(format!("reference point {x:?} is not feasible")));
            }
            let theta = solve_minmax(&f.gradients(x)?, x, set, 1e-12)?.theta_fw;
            if theta.abs() > ANALYTIC_STATIONARITY_TOL {
                return Err(invalid(format!(
                    "reference point {x:?} is not stationary (theta = {theta:e})"
                )));
            }
            Ok(ReferencePoint {
                f_star: f.evaluate(x)?,
                x_star: x.clone(),
                provenance: Provenance::Analytic,
                fingerprint,
            })
        }
        ReferenceMode::Refine { tol, x0, max_iters } => {
            let cfg = RunConfig {
                max_iters: *max_iters,
                theta_tol: *tol,
                x0: x0.clone(),
                subproblem_tol: tol.max(1e-14),
                ..RunConfig::default()
            };
            let h = solver::run(f, set, &cfg)?;
            let last = h.last();
            let achieved = last.theta_fw.abs();
            if h.termination != Termination::Converged {
                return Err(Error::PartialReference {
                    achieved,
                    target: *tol,
                    x: last.x.clone(),
                });
            }
            Ok(ReferencePoint {
                x_star: last.x.clone(),
                f_star: last.f_values.clone(),
                provenance: Provenance::Refined {
                    tol: *tol,
                    achieved,
                },
                fingerprint,
            })
        }
    }
}
