use std::fmt;

use super::rates::merit_series;
use super::reference::ReferencePoint;
use crate::error::{Error, Result};
use crate::numerics;
use crate::objectives::MultiObjective;
use crate::sets::FeasibleSet;
use crate::solver::{problem_fingerprint, RunHistory};

/// Relative tolerance of every check.
pub const VERIFY_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    /// `F_j(x^{k+1}) <= F_j(x^k) + θ_k γ_k / 2`.
    Descent,
    /// `ĥ(x^{k+1}) <= L D² / 2`.
    MeritBound,
    /// `(μ/2)‖x^k − x*‖² <= |θ_k|`.
    DistanceBound,
    /// `|θ_k| >= (α/4)‖d_k‖^q |θ̃_k|`.
    UniformGap,
    /// `ĥ_{k+1} <= [1 − min{½, r_k}] ĥ_k`.
    UniformRecursion,
    /// `Σ_{i>=m} θ_i² <= 2 L D² ĥ(x^m)`.
    SquaredSum,
    /// `Σ_{i>=m} min{|θ_i|, θ_i²/(L‖d_i‖²)} <= 2 ĥ(x^m)`.
    MinSum,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::Descent,
        Check::MeritBound,
        Check::DistanceBound,
        Check::UniformGap,
        Check::UniformRecursion,
        Check::SquaredSum,
        Check::MinSum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Descent => "descent",
            Check::MeritBound => "merit-bound",
            Check::DistanceBound => "distance-bound",
            Check::UniformGap => "uniform-gap",
            Check::UniformRecursion => "uniform-recursion",
            Check::SquaredSum => "squared-sum",
            Check::MinSum => "min-sum",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CheckStatus {
    Passed { checked: usize },
    /// `violations` lists iteration numbers.
    Failed { checked: usize, violations: Vec<usize>, worst_excess: f64 },
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub check: Check,
    pub status: CheckStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub results: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.results
            .iter()
            .all(|r| !matches!(r.status, CheckStatus::Failed { .. }))
    }

    pub fn status(&self, check: Check) -> &CheckStatus {
        &self
            .results
            .iter()
            .find(|r| r.check == check)
            .expect("every check is reported")
            .status
    }

    pub fn violations(&self) -> usize {
        self.results
            .iter()
            .map(|r| match &r.status {
                CheckStatus::Failed { violations, .. } => violations.len(),
                _ => 0,
            })
            .sum()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            match &r.status {
                CheckStatus::Passed { checked } => {
                    writeln!(f, "{:<18} pass {checked}/{checked}", r.check.name())?
                }
                CheckStatus::Failed {
                    checked,
                    violations,
                    worst_excess,
                } => {
                    let shown: Vec<String> = violations.iter().take(10).map(|k| k.to_string()).collect();
                    writeln!(
                        f,
                        "{:<18} FAIL {}/{checked} violated at k = {}{} (worst excess {worst_excess:.3e})",
                        r.check.name(),
                        violations.len(),
                        shown.join(", "),
                        if violations.len() > 10 { ", ..." } else { "" }
                    )?
                }
                CheckStatus::Skipped(reason) => writeln!(f, "{:<18} skipped: {reason}", r.check.name())?,
            }
        }
        Ok(())
    }
}

struct Tally {
    checked: usize,
    violations: Vec<usize>,
    worst: f64,
}

impl Tally {
    fn new() -> Self {
        Self {
            checked: 0,
            violations: Vec::new(),
            worst: 0.0,
        }
    }

    /// Records `lhs <= rhs` up to the relative tolerance plus `extra`.
    fn le(&mut self, k: usize, lhs: f64, rhs: f64, extra: f64) {
        self.checked += 1;
        let slack = VERIFY_REL_TOL * 1f64.max(lhs.abs()).max(rhs.abs()) + extra;
        let excess = lhs - rhs;
        if !(excess <= slack) {
            if !self.violations.contains(&k) {
                self.violations.push(k);
            }
            self.worst = self.worst.max(if excess.is_nan() { f64::INFINITY } else { excess });
        }
    }

    fn status(self) -> CheckStatus {
        if self.violations.is_empty() {
            CheckStatus::Passed {
                checked: self.checked,
            }
        } else {
            CheckStatus::Failed {
                checked: self.checked,
                violations: self.violations,
                worst_excess: self.worst,
            }
        }
    }
}

/// Per-iteration checks of the recorded history. `L` is the history's step
/// constant and `D` the Euclidean diameter of the set.
pub fn verify_inequalities(
    history: &RunHistory,
    f: &MultiObjective,
    set: &FeasibleSet,
    reference: &ReferencePoint,
) -> Result<VerifyReport> {
    let fp = problem_fingerprint(f, set);
    if history.fingerprint != fp {
        return Err(Error::InvalidPairing(format!(
            "history fingerprint {} but problem fingerprint {fp}",
            history.fingerprint
        )));
    }
    let merit = merit_series(history, reference)?;
    let h = &merit.h_hat;
    let recs = &history.records;
    let l = history.smoothness;
    let mu = f.strong_convexity_constant();
    let ref_slack = reference.slack();
    let diameter = set.euclidean_diameter();
    let mut results = Vec::new();

    let mut descent = Tally::new();
    for w in recs.windows(2) {
        let Some(gamma) = w[0].gamma else { continue };
        for (fk, fk1) in w[0].f_values.iter().zip(&w[1].f_values) {
            descent.le(w[0].k, *fk1, fk + w[0].theta_fw * gamma / 2.0, 0.0);
        }
    }
    results.push(CheckResult {
        check: Check::Descent,
        status: descent.status(),
    });

    let no_diameter = |e: &Error| CheckStatus::Skipped(format!("no diameter: {e}"));
    results.push(CheckResult {
        check: Check::MeritBound,
        status: match &diameter {
            Ok(d) => {
                let mut t = Tally::new();
                let bound = l * d * d / 2.0;
                for (r, hk) in recs.iter().zip(h).skip(1) {
                    t.le(r.k, *hk, bound, ref_slack);
                }
                t.status()
            }
            Err(e) => no_diameter(e),
        },
    });

    results.push(CheckResult {
        check: Check::DistanceBound,
        status: if mu > 0.0 {
            let mut t = Tally::new();
            for r in recs {
                let dist = numerics::dist2(&r.x, &reference.x_star);
                t.le(r.k, 0.5 * mu * dist * dist, r.theta_fw.abs(), ref_slack);
            }
            t.status()
        } else {
            CheckStatus::Skipped("objective is not strongly convex".into())
        },
    });

    let (gap, recursion) = uniform_checks(history, h, set, l, ref_slack);
    results.push(CheckResult {
        check: Check::UniformGap,
        status: gap,
    });
    results.push(CheckResult {
        check: Check::UniformRecursion,
        status: recursion,
    });

    results.push(CheckResult {
        check: Check::SquaredSum,
        status: match (&diameter, mu > 0.0) {
            (_, false) => CheckStatus::Skipped("objective is not strongly convex".into()),
            (Err(e), _) => no_diameter(e),
            (Ok(d), true) => {
                let terms: Vec<f64> = recs.iter().map(|r| r.theta_fw * r.theta_fw).collect();
                suffix_check(recs, &terms, |m| 2.0 * l * d * d * h[m], ref_slack)
            }
        },
    });

    let terms: Vec<f64> = recs
        .iter()
        .map(|r| {
            let t = r.theta_fw.abs();
            let dd = r.d_norm * r.d_norm;
            if dd > 0.0 {
                t.min(t * t / (l * dd))
            } else {
                t
            }
        })
        .collect();
    results.push(CheckResult {
        check: Check::MinSum,
        status: suffix_check(recs, &terms, |m| 2.0 * h[m], ref_slack),
    });

    Ok(VerifyReport { results })
}

/// `Σ_{i>=m} terms_i <= bound(m)` for every `m >= 1`.
fn suffix_check(
    recs: &[crate::solver::IterateRecord],
    terms: &[f64],
    bound: impl Fn(usize) -> f64,
    extra: f64,
) -> CheckStatus {
    let mut t = Tally::new();
    let mut suffix = 0.0;
    for m in (1..recs.len()).rev() {
        suffix += terms[m];
        t.le(recs[m].k, suffix, bound(m), extra);
    }
    t.status()
}

fn uniform_checks(
    history: &RunHistory,
    h: &[f64],
    set: &FeasibleSet,
    l: f64,
    ref_slack: f64,
) -> (CheckStatus, CheckStatus) {
    let Some(info) = set.uniform_convexity_params() else {
        let s = CheckStatus::Skipped("set has no uniform-convexity constants".into());
        return (s.clone(), s);
    };
    if !history.has_theta_tilde() {
        let s = CheckStatus::Skipped("history has no theta-tilde values".into());
        return (s.clone(), s);
    }
    let (alpha, q) = (info.alpha, info.q);
    let euclidean = info.norm == numerics::PNorm::Finite(2.0);
    let recs = &history.records;
    let mut gap = Tally::new();
    let mut rec = Tally::new();
    for (i, r) in recs.iter().enumerate() {
        let tt = r.theta_tilde.expect("checked above").abs();
        let next = recs.get(i + 1);
        let d_norm = match (euclidean, r.gamma, next) {
            (true, _, _) => Some(r.d_norm),
            (false, Some(g), Some(n)) => {
                let d = numerics::scale(1.0 / g, &numerics::sub(&n.x, &r.x));
                Some(info.norm.norm(&d))
            }
            _ => None,
        };
        if let Some(dn) = d_norm {
            gap.le(r.k, alpha / 4.0 * dn.powf(q) * tt, r.theta_fw.abs(), 0.0);
        }
        if let Some(_) = next {
            let hk = h[i].max(0.0);
            let rk = hk.powf((q - 2.0) / q) * (alpha * tt).powf(2.0 / q)
                / (2f64.powf((4.0 + q) / q) * l);
            rec.le(r.k, h[i + 1], (1.0 - rk.min(0.5)) * h[i], ref_slack);
        }
    }
    (gap.status(), rec.status())
}
