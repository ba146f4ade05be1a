//! Subcommand bodies. Each returns the text to print; failures that map to
//! a nonzero exit come back as [`CliError`].

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use mfw_core::analysis::{
    compute_reference, fit_rate, max_contraction, measured_c_lower, merit_series,
    verify_inequalities, CertificateConstants, FitWindow, MeritSeries, RateModel, ReferenceMode,
    ReferencePoint,
};
use mfw_core::grid_oracle::oracle_check;
use mfw_core::presets;
use mfw_core::{run, Error, FeasibleSet, MultiObjective, RunHistory};

use crate::problem::{self, Problem};
use crate::svg::{line_chart, Axes, Series};
use crate::{history, CliError, Result};

pub const ORACLE_MAX_DEVIATION: f64 = 1e-3;
pub const ORACLE_ZOOM_LEVELS: usize = 3;
pub const ORACLE_SUBPROBLEM_TOL: f64 = 1e-10;

#[derive(Debug, Default, Clone)]
pub struct RunFlags {
    pub max_iters: Option<usize>,
    pub tol: Option<f64>,
    pub record_theta_tilde: bool,
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn out_dir(dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    Ok(dir.to_path_buf())
}

fn summary(h: &RunHistory) -> String {
    let last = h.last();
    let mut s = String::new();
    let _ = writeln!(s, "fingerprint  {}", h.fingerprint);
    let _ = writeln!(s, "termination  {}", h.termination);
    let _ = writeln!(s, "iterations   {}", last.k);
    let _ = writeln!(s, "L            {}", h.smoothness);
    let _ = writeln!(s, "theta_fw     {:.6e}", last.theta_fw);
    let _ = writeln!(s, "x            {:?}", last.x);
    let _ = writeln!(s, "F            {:?}", last.f_values);
    s
}

pub fn cmd_run(problem_path: &Path, out: &Path, flags: &RunFlags) -> Result<String> {
    let mut p = problem::load(problem_path)?;
    if let Some(n) = flags.max_iters {
        p.config.max_iters = n;
    }
    if let Some(t) = flags.tol {
        p.config.theta_tol = t;
    }
    if flags.record_theta_tilde {
        p.config.record_theta_tilde = true;
    }
    p.config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let h = run(&p.objective, &p.set, &p.config)?;
    let dir = out_dir(out)?;
    history::save(&h, &dir.join("history.csv"))?;
    let text = summary(&h);
    write_file(&dir.join("summary.txt"), &text)?;
    Ok(text)
}

/// Reference for a problem; an unfinished refine run still yields a usable
/// point whose residual widens the verification slack.
pub fn reference_for(f: &MultiObjective, set: &FeasibleSet, mode: &ReferenceMode) -> Result<ReferencePoint> {
    match compute_reference(f, set, mode) {
        Ok(r) => Ok(r),
        Err(e @ Error::PartialReference { .. }) => {
            Ok(ReferencePoint::from_partial(f, set, &e).ok_or(CliError::Core(e))?)
        }
        Err(e) => Err(e.into()),
    }
}

fn fit_line(series: &MeritSeries, model: RateModel, window: FitWindow) -> String {
    match fit_rate(series, model, window) {
        Ok(r) => r.to_string(),
        Err(e) => format!("model={model} {e}"),
    }
}

fn example_report(p: &presets::Preset, h: &RunHistory, m: &MeritSeries) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "example {}: {}", p.name, p.description);
    let _ = writeln!(s, "iterations {} ({})", h.last().k, h.termination);
    let _ = writeln!(s, "final merit {:.6e}", m.h_hat.last().copied().unwrap_or(f64::NAN));
    let _ = writeln!(s, "expected {}", fit_line(m, p.model, FitWindow::Tail));
    let other = match p.model {
        RateModel::Geometric => RateModel::Power,
        RateModel::Power => RateModel::Geometric,
    };
    let _ = writeln!(s, "alternative {}", fit_line(m, other, FitWindow::Tail));
    if let Some(c) = measured_c_lower(h) {
        let _ = writeln!(s, "min |theta_tilde| {c:.6e}");
        if let Some(info) = p.set.uniform_convexity_params() {
            let consts = CertificateConstants {
                alpha: info.alpha,
                q: info.q,
                mu: p.objective.strong_convexity_constant(),
                l: h.smoothness,
                diameter: p.set.euclidean_diameter().unwrap_or(f64::NAN),
                c_lower: c,
            };
            let _ = writeln!(s, "zeta {:.6e} bound {:.6e}", consts.zeta(), consts.contraction_factor());
        }
    }
    if let Some(r) = max_contraction(m) {
        let _ = writeln!(s, "max contraction {r:.6e}");
    }
    if !m.negative.is_empty() {
        let _ = writeln!(s, "negative merit at k = {:?}", m.negative);
    }
    s
}

pub fn cmd_example(name: &str, out: &Path) -> Result<String> {
    let p = presets::preset(name).map_err(|e| CliError::Usage(e.to_string()))?;
    let h = run(&p.objective, &p.set, &p.config)?;
    let r = reference_for(&p.objective, &p.set, &p.reference)?;
    let m = merit_series(&h, &r)?;
    let dir = out_dir(out)?;
    write_file(&dir.join("problem.toml"), &format!("preset = \"{name}\"\n"))?;
    history::save(&h, &dir.join("history.csv"))?;

    let pts: Vec<(f64, f64)> = m.k.iter().zip(&m.h_hat).map(|(k, v)| (*k as f64, *v)).collect();
    let series = [Series { label: "merit", points: &pts }];
    let title = format!("example {name}");
    write_file(&dir.join("merit.svg"), &line_chart(&title, "k", "merit", Axes::SemiLog, &series))?;
    if p.model == RateModel::Power {
        write_file(&dir.join("merit-loglog.svg"), &line_chart(&title, "k", "merit", Axes::LogLog, &series))?;
    }
    let report = example_report(&p, &h, &m);
    write_file(&dir.join("rates.txt"), &report)?;
    write_file(&dir.join("summary.txt"), &summary(&h))?;
    Ok(report)
}

/// Merit against the problem's reference, or against the last iterate when
/// no problem is given.
pub fn cmd_rates(
    history_path: &Path,
    model: RateModel,
    window: FitWindow,
    problem_path: Option<&Path>,
) -> Result<String> {
    let h = history::load(history_path)?;
    let m = match problem_path {
        Some(pp) => {
            let p = problem::load(pp)?;
            let r = reference_for(&p.objective, &p.set, &p.reference_mode())?;
            merit_series(&h, &r)?
        }
        None => {
            let last = &h.last().f_values;
            let k = h.records.iter().map(|r| r.k).collect();
            let v = h
                .records
                .iter()
                .map(|r| {
                    r.f_values
                        .iter()
                        .zip(last)
                        .map(|(a, b)| a - b)
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .collect();
            MeritSeries::from_values(k, v)?
        }
    };
    Ok(format!("{}\n", fit_rate(&m, model, window)?))
}

pub fn cmd_verify(history_path: &Path, problem_path: &Path) -> Result<String> {
    let h = history::load(history_path)?;
    let p: Problem = problem::load(problem_path)?;
    let r = reference_for(&p.objective, &p.set, &p.reference_mode())?;
    let report = verify_inequalities(&h, &p.objective, &p.set, &r)?;
    let text = report.to_string();
    if report.passed() {
        Ok(text)
    } else {
        Err(CliError::Verification(format!(
            "{text}{} violation(s)",
            report.violations()
        )))
    }
}

pub fn cmd_oracle_check(problem_path: &Path, trials: usize, seed: u64) -> Result<String> {
    let p = problem::load(problem_path)?;
    if p.set.dim() != 2 {
        return Err(CliError::Usage(format!(
            "the grid oracle only supports 2-D problems (dimension {})",
            p.set.dim()
        )));
    }
    let rep = oracle_check(&p.objective, &p.set, trials, seed, ORACLE_ZOOM_LEVELS, ORACLE_SUBPROBLEM_TOL)?;
    let mut s = format!(
        "trials {} max |theta_solver - theta_grid| {:.3e} max duality gap {:.3e}\n",
        rep.trials, rep.max_deviation, rep.max_duality_gap
    );
    if let Some((x, solver, grid)) = &rep.worst {
        let _ = writeln!(s, "worst at x = {x:?}: solver {solver:.9e} grid {grid:.9e}");
    }
    if rep.max_deviation > ORACLE_MAX_DEVIATION {
        return Err(CliError::Verification(s));
    }
    Ok(s)
}

pub fn parse_window(s: &str) -> Result<FitWindow> {
    let bad = || CliError::Usage(format!("window must look like a:b, got {s:?}"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let lo = a.trim().parse().map_err(|_| bad())?;
    let hi = b.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok(FitWindow::Range(lo, hi))
}
