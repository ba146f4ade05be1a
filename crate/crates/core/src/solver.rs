//! The M-FW main loop.

use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::numerics;
use crate::objectives::MultiObjective;
use crate::sets::{FeasibleSet, DEFAULT_MEMBERSHIP_TOL};
use crate::subproblem::{self, MinMaxSolver};

pub const DEFAULT_THETA_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITERS: usize = 5000;

#[derive(Debug, Clone, PartialEq, Default)]
pub enum StartPoint {
    /// `lmo(1, …, 1)`, see [`default_start`].
    #[default]
    Default,
    Given(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub max_iters: usize,
    /// Stop once `|θ^FW| <= theta_tol`.
    pub theta_tol: f64,
    pub l_override: Option<f64>,
    pub record_theta_tilde: bool,
    pub x0: StartPoint,
    /// Duality-gap tolerance of each subproblem solve.
    pub subproblem_tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            max_iters: DEFAULT_MAX_ITERS,
            theta_tol: DEFAULT_THETA_TOL,
            l_override: None,
            record_theta_tilde: false,
            x0: StartPoint::Default,
            subproblem_tol: subproblem::DEFAULT_TOL,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(invalid("max_iters must be >= 1"));
        }
        if !(self.theta_tol > 0.0 && self.theta_tol.is_finite()) {
            return Err(invalid(format!("theta_tol {} must be > 0", self.theta_tol)));
        }
        if let Some(l) = self.l_override {
            if !(l > 0.0 && l.is_finite()) {
                return Err(invalid(format!("L override {l} must be > 0")));
            }
        }
        if !(self.subproblem_tol > 0.0) {
            return Err(invalid("subproblem_tol must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepType {
    Full,
    Interior,
}

/// State at iterate `k` and the step taken from it. The last record of a
/// history has no step (`gamma = None`).
#[derive(Debug, Clone, PartialEq)]
pub struct IterateRecord {
    pub k: usize,
    pub x: Vec<f64>,
    pub f_values: Vec<f64>,
    pub theta_fw: f64,
    pub gamma: Option<f64>,
    /// `‖d^FW(x^k)‖₂`.
    pub d_norm: f64,
    pub theta_tilde: Option<f64>,
}

impl IterateRecord {
    pub fn step_type(&self) -> Option<StepType> {
        self.gamma
            .map(|g| if g >= 1.0 { StepType::Full } else { StepType::Interior })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    IterationCap,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Termination::Converged => "converged",
            Termination::IterationCap => "iteration-cap",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunHistory {
    pub records: Vec<IterateRecord>,
    pub termination: Termination,
    pub fingerprint: String,
    /// Smoothness constant used for the step sizes.
    pub smoothness: f64,
}

impl RunHistory {
    pub fn last(&self) -> &IterateRecord {
        self.records.last().expect("histories are non-empty")
    }

    pub fn has_theta_tilde(&self) -> bool {
        self.records.iter().all(|r| r.theta_tilde.is_some())
    }
}

/// First 16 hex digits of SHA-256 over the problem description.
pub fn problem_fingerprint(f: &MultiObjective, set: &FeasibleSet) -> String {
    let mut h = Sha256::new();
    h.update(f.describe().as_bytes());
    h.update(b"|");
    h.update(set.describe().as_bytes());
    hex::encode(h.finalize())[..16].to_string()
}

/// `lmo(1, …, 1)`, i.e. the lowest-index minimizer of the coordinate sum.
pub fn default_start(set: &FeasibleSet) -> Vec<f64> {
    set.lmo(&vec![1.0; set.dim()])
        .expect("all-ones direction has the set's dimension")
        .point
}

/// `min{1, −θ / (L‖d‖²)}`.
pub fn step_size(theta: f64, d_norm_sq: f64, l: f64) -> f64 {
    (-theta / (l * d_norm_sq)).min(1.0)
}

fn subproblem_record(
    k: usize,
    x: &[f64],
    f: &MultiObjective,
    set: &FeasibleSet,
    solver: &mut MinMaxSolver,
    record_theta_tilde: bool,
) -> Result<(IterateRecord, Vec<f64>)> {
    let g = f.gradients(x)?;
    let res = solver.solve(&g, x, set)?;
    let theta_tilde = if record_theta_tilde {
        Some(subproblem::theta_tilde(&g)?.0)
    } else {
        None
    };
    let rec = IterateRecord {
        k,
        x: x.to_vec(),
        f_values: f.evaluate(x)?,
        theta_fw: res.theta_fw,
        gamma: None,
        d_norm: numerics::norm2(&res.d_fw),
        theta_tilde,
    };
    Ok((rec, res.d_fw))
}

fn take_step(rec: &mut IterateRecord, d: &[f64], l: f64) -> Result<Vec<f64>> {
    let dd = numerics::dot(d, d);
    if dd == 0.0 {
        return Err(Error::InternalConsistency(format!(
            "zero Frank-Wolfe direction with theta = {:e}",
            rec.theta_fw
        )));
    }
    let gamma = step_size(rec.theta_fw, dd, l);
    if !(gamma > 0.0) {
        return Err(Error::InternalConsistency(format!(
            "non-positive step size {gamma:e} at theta = {:e}",
            rec.theta_fw
        )));
    }
    rec.gamma = Some(gamma);
    let mut next = rec.x.clone();
    numerics::axpy(gamma, d, &mut next);
    Ok(next)
}

/// One M-FW step from `x`. The record carries `k = 0`.
pub fn mfw_step(
    x: &[f64],
    f: &MultiObjective,
    set: &FeasibleSet,
    l: f64,
    tol: f64,
) -> Result<(Vec<f64>, IterateRecord)> {
    if !(l > 0.0) {
        return Err(invalid(format!("L = {l} must be > 0")));
    }
    check_start(x, f, set)?;
    let mut solver = MinMaxSolver::new(tol)?;
    let (mut rec, d) = subproblem_record(0, x, f, set, &mut solver, false)?;
    if rec.theta_fw == 0.0 {
        return Ok((x.to_vec(), rec));
    }
    let next = take_step(&mut rec, &d, l)?;
    Ok((next, rec))
}

fn check_start(x: &[f64], f: &MultiObjective, set: &FeasibleSet) -> Result<()> {
    if f.dim() != set.dim() {
        return Err(invalid(format!(
            "objective dimension {} differs from set dimension {}",
            f.dim(),
            set.dim()
        )));
    }
    if x.len() != set.dim() || !set.contains(x, DEFAULT_MEMBERSHIP_TOL) {
        return Err(invalid(format!("start point {x:?} is not feasible")));
    }
    Ok(())
}

/// Iterates until `|θ^FW(x^k)| <= theta_tol` or `max_iters` steps were taken.
pub fn run(f: &MultiObjective, set: &FeasibleSet, cfg: &RunConfig) -> Result<RunHistory> {
    cfg.validate()?;
    let mut x = match &cfg.x0 {
        StartPoint::Default => default_start(set),
        StartPoint::Given(x0) => x0.clone(),
    };
    check_start(&x, f, set)?;
    let l = cfg.l_override.unwrap_or_else(|| f.smoothness_constant());
    let mut solver = MinMaxSolver::new(cfg.subproblem_tol)?;
    let mut records = Vec::new();
    let termination;
    let mut k = 0;
    loop {
        let at = |e: Error| Error::AtIteration {
            iteration: k,
            source: Box::new(e),
        };
        let (mut rec, d) =
            subproblem_record(k, &x, f, set, &mut solver, cfg.record_theta_tilde).map_err(at)?;
        if rec.theta_fw.abs() <= cfg.theta_tol {
            records.push(rec);
            termination = Termination::Converged;
            break;
        }
        if k == cfg.max_iters {
            records.push(rec);
            termination = Termination::IterationCap;
            break;
        }
        x = take_step(&mut rec, &d, l).map_err(at)?;
        records.push(rec);
        k += 1;
    }
    Ok(RunHistory {
        records,
        termination,
        fingerprint: problem_fingerprint(f, set),
        smoothness: l,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::QuadraticComponent;
    use crate::sets::{HalfspacePolytope, NormBall};
    use approx::assert_relative_eq;

    fn example_1a() -> (MultiObjective, FeasibleSet) {
        let f = MultiObjective::quadratic(vec![
            QuadraticComponent::shifted_identity(&[-0.6, -0.6]),
            QuadraticComponent::shifted_identity(&[-0.5, -0.5]),
        ])
        .unwrap();
        let set = HalfspacePolytope::l1_ball(1.0, vec![0.0, 0.0]).unwrap().into();
        (f, set)
    }

    #[test]
    fn step_size_examples() {
        assert_eq!(step_size(-1.0, 4.0, 1.0), 0.25);
        assert_eq!(step_size(-8.0, 4.0, 1.0), 1.0);
    }

    #[test]
    fn default_start_examples() {
        let disk: FeasibleSet = NormBall::unit(2.0, 2).unwrap().into();
        let s = default_start(&disk);
        assert_relative_eq!(s[0], -(0.5_f64.sqrt()), epsilon = 1e-15);
        assert_relative_eq!(s[1], -(0.5_f64.sqrt()), epsilon = 1e-15);
        let l1: FeasibleSet = HalfspacePolytope::l1_ball(1.0, vec![0.0, 0.0]).unwrap().into();
        assert_eq!(default_start(&l1), vec![-1.0, 0.0]);
        let l1b: FeasibleSet = NormBall::unit(1.0, 2).unwrap().into();
        assert_eq!(default_start(&l1b), vec![-1.0, 0.0]);
        let sq: FeasibleSet = HalfspacePolytope::axis_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap().into();
        assert_eq!(default_start(&sq), vec![0.0, 0.0]);
    }

    #[test]
    fn first_step_of_example_1a_descends() {
        let (f, set) = example_1a();
        let x0 = [1.0, 0.0];
        let (x1, rec) = mfw_step(&x0, &f, &set, 1.0, 1e-10).unwrap();
        assert_relative_eq!(rec.theta_fw, -3.0, epsilon = 1e-12);
        let gamma = rec.gamma.unwrap();
        assert_relative_eq!(gamma, 0.75, epsilon = 1e-12);
        assert_eq!(rec.step_type(), Some(StepType::Interior));
        let f0 = f.evaluate(&x0).unwrap();
        let f1 = f.evaluate(&x1).unwrap();
        for j in 0..2 {
            assert!(f1[j] <= f0[j] + rec.theta_fw * gamma / 2.0 + 1e-12);
        }
        assert!(set.contains(&x1, 1e-9));
    }

    #[test]
    fn starting_at_a_critical_point_stops_immediately() {
        let f = MultiObjective::quadratic(vec![
            QuadraticComponent::shifted_identity(&[0.5, 0.0]),
            QuadraticComponent::shifted_identity(&[-0.5, 0.0]),
        ])
        .unwrap();
        let set: FeasibleSet = NormBall::unit(2.0, 2).unwrap().into();
        let cfg = RunConfig {
            x0: StartPoint::Given(vec![0.0, 0.0]),
            ..RunConfig::default()
        };
        let h = run(&f, &set, &cfg).unwrap();
        assert_eq!(h.records.len(), 1);
        assert_eq!(h.termination, Termination::Converged);
        assert_eq!(h.last().gamma, None);
    }

    #[test]
    fn iteration_cap_and_invariants() {
        let (f, set) = example_1a();
        let cfg = RunConfig {
            max_iters: 50,
            x0: StartPoint::Given(vec![0.0, 1.0]),
            record_theta_tilde: true,
            ..RunConfig::default()
        };
        let h = run(&f, &set, &cfg).unwrap();
        assert_eq!(h.termination, Termination::IterationCap);
        assert_eq!(h.records.len(), 51);
        for (i, w) in h.records.windows(2).enumerate() {
            assert_eq!(w[0].k, i);
            assert!(w[0].theta_fw <= 0.0);
            let g = w[0].gamma.unwrap();
            assert!(g > 0.0 && g <= 1.0);
            for j in 0..2 {
                let slack = 1e-10 * (1.0 + w[0].f_values[j].abs());
                assert!(w[1].f_values[j] <= w[0].f_values[j] + w[0].theta_fw * g / 2.0 + slack);
            }
            assert!(set.contains(&w[1].x, 1e-8));
            assert!(w[0].theta_tilde.is_some());
        }
        assert_eq!(h.fingerprint.len(), 16);
        assert_eq!(h.fingerprint, problem_fingerprint(&f, &set));
    }

    #[test]
    fn rejects_bad_configs_and_starts() {
        let (f, set) = example_1a();
        let bad = RunConfig {
            max_iters: 0,
            ..RunConfig::default()
        };
        assert!(run(&f, &set, &bad).is_err());
        let outside = RunConfig {
            x0: StartPoint::Given(vec![1.0, 1.0]),
            ..RunConfig::default()
        };
        assert!(run(&f, &set, &outside).is_err());
        let tol = RunConfig {
            theta_tol: 0.0,
            ..RunConfig::default()
        };
        assert!(run(&f, &set, &tol).is_err());
    }

    #[test]
    fn fingerprint_separates_problems() {
        let (f, set) = example_1a();
        let disk: FeasibleSet = NormBall::unit(2.0, 2).unwrap().into();
        assert_ne!(problem_fingerprint(&f, &set), problem_fingerprint(&f, &disk));
    }
}
