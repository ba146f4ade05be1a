//! TOML problem files.
//!
//! ```toml
//! [[objectives]]
//! A = [[1.0, 0.0], [0.0, 1.0]]   # optional, identity by default
//! b = [-0.6, -0.6]
//!
//! [set]
//! kind = "lp_ball"               # or "polytope" with A, b, vertices, diameter
//! p = 2.0                        # "inf" for the max-norm
//! radius = 1.0
//!
//! [config]
//! max_iters = 500
//! x0 = [0.0, 1.0]
//!
//! [reference]
//! x_star = [-0.5, -0.5]          # or refine_tol = 1e-13
//! ```
//!
//! A file may instead name a worked example with `preset = "1a"` and
//! optionally override `config` and `reference`.

use std::path::Path;

use mfw_core::analysis::{ReferenceMode, DEFAULT_REFINE_TOL, MAX_REFINE_ITERS};
use mfw_core::presets;
use mfw_core::{
    FeasibleSet, HalfspacePolytope, Matrix, MultiObjective, NormBall, QuadraticComponent,
    RunConfig, StartPoint,
};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    preset: Option<String>,
    objectives: Option<Vec<ObjectiveSpec>>,
    set: Option<SetSpec>,
    config: Option<ConfigSpec>,
    reference: Option<ReferenceSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectiveSpec {
    #[serde(rename = "A")]
    a: Option<Vec<Vec<f64>>>,
    b: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Exponent {
    Number(f64),
    Name(String),
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SetSpec {
    LpBall {
        p: Exponent,
        radius: Option<f64>,
        center: Option<Vec<f64>>,
    },
    Polytope {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        vertices: Option<Vec<Vec<f64>>>,
        diameter: Option<f64>,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigSpec {
    max_iters: Option<usize>,
    theta_tol: Option<f64>,
    #[serde(rename = "L")]
    l_override: Option<f64>,
    record_theta_tilde: Option<bool>,
    x0: Option<Vec<f64>>,
    subproblem_tol: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReferenceSpec {
    x_star: Option<Vec<f64>>,
    refine_tol: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub preset: Option<&'static str>,
    pub objective: MultiObjective,
    pub set: FeasibleSet,
    pub config: RunConfig,
    pub reference: Option<ReferenceMode>,
}

impl Problem {
    pub fn from_preset(name: &str) -> Result<Self, CliError> {
        let p = presets::preset(name).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(Self {
            preset: Some(p.name),
            objective: p.objective,
            set: p.set,
            config: p.config,
            reference: Some(p.reference),
        })
    }

    /// Reference mode used by analysis commands: the file's choice, else a
    /// refine run from the configured start.
    pub fn reference_mode(&self) -> ReferenceMode {
        self.reference
            .clone()
            .unwrap_or_else(|| ReferenceMode::refine_from(self.config.x0.clone()))
    }
}

pub fn load(path: &Path) -> Result<Problem, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text).map_err(|message| CliError::Parse {
        path: path.display().to_string(),
        message,
    })
}

pub fn parse(text: &str) -> Result<Problem, String> {
    let file: ProblemFile = toml::from_str(text).map_err(|e| e.to_string())?;
    let mut problem = match (&file.preset, file.objectives, file.set) {
        (Some(name), None, None) => Problem::from_preset(name).map_err(|e| format!("preset: {e}"))?,
        (Some(_), _, _) => return Err("`preset` cannot be combined with `objectives` or `set`".into()),
        (None, None, _) => return Err("missing field `objectives` (or `preset`)".into()),
        (None, _, None) => return Err("missing field `set` (or `preset`)".into()),
        (None, Some(objectives), Some(set)) => build(objectives, set)?,
    };
    if let Some(cfg) = file.config {
        apply_config(&mut problem.config, cfg);
    }
    problem.config.validate().map_err(|e| format!("config: {e}"))?;
    if let Some(r) = file.reference {
        problem.reference = Some(match (r.x_star, r.refine_tol) {
            (Some(x), None) => ReferenceMode::Analytic(x),
            (None, Some(tol)) => ReferenceMode::Refine {
                tol,
                x0: problem.config.x0.clone(),
                max_iters: MAX_REFINE_ITERS,
            },
            (None, None) => ReferenceMode::Refine {
                tol: DEFAULT_REFINE_TOL,
                x0: problem.config.x0.clone(),
                max_iters: MAX_REFINE_ITERS,
            },
            (Some(_), Some(_)) => {
                return Err("reference: give either `x_star` or `refine_tol`, not both".into())
            }
        });
    }
    Ok(problem)
}

fn build(objectives: Vec<ObjectiveSpec>, set: SetSpec) -> Result<Problem, String> {
    if objectives.is_empty() {
        return Err("objectives: at least one objective is required".into());
    }
    let mut parts = Vec::with_capacity(objectives.len());
    for (i, o) in objectives.into_iter().enumerate() {
        let a = match o.a {
            Some(rows) => Matrix::from_rows(&rows),
            None => Ok(Matrix::identity(o.b.len())),
        }
        .map_err(|e| format!("objectives[{i}].A: {e}"))?;
        parts.push(QuadraticComponent::new(a, o.b).map_err(|e| format!("objectives[{i}]: {e}"))?);
    }
    let objective = MultiObjective::quadratic(parts).map_err(|e| format!("objectives: {e}"))?;
    let n = objective.dim();
    let set: FeasibleSet = match set {
        SetSpec::LpBall { p, radius, center } => {
            let p = match p {
                Exponent::Number(v) => v,
                Exponent::Name(s) if s == "inf" => f64::INFINITY,
                Exponent::Name(s) => return Err(format!("set.p: expected a number or \"inf\", got {s:?}")),
            };
            NormBall::new(p, radius.unwrap_or(1.0), center.unwrap_or_else(|| vec![0.0; n]))
                .map_err(|e| format!("set: {e}"))?
                .into()
        }
        SetSpec::Polytope {
            a,
            b,
            vertices,
            diameter,
        } => {
            let a = Matrix::from_rows(&a).map_err(|e| format!("set.A: {e}"))?;
            let mut poly = HalfspacePolytope::new(a, b, vertices).map_err(|e| format!("set: {e}"))?;
            if let Some(d) = diameter {
                poly = poly.with_declared_diameter(d).map_err(|e| format!("set.diameter: {e}"))?;
            }
            poly.into()
        }
    };
    if set.dim() != n {
        return Err(format!("set: dimension {} but objectives have dimension {n}", set.dim()));
    }
    Ok(Problem {
        preset: None,
        objective,
        set,
        config: RunConfig::default(),
        reference: None,
    })
}

fn apply_config(cfg: &mut RunConfig, spec: ConfigSpec) {
    if let Some(v) = spec.max_iters {
        cfg.max_iters = v;
    }
    if let Some(v) = spec.theta_tol {
        cfg.theta_tol = v;
    }
    if let Some(v) = spec.l_override {
        cfg.l_override = Some(v);
    }
    if let Some(v) = spec.record_theta_tilde {
        cfg.record_theta_tilde = v;
    }
    if let Some(v) = spec.x0 {
        cfg.x0 = StartPoint::Given(v);
    }
    if let Some(v) = spec.subproblem_tol {
        cfg.subproblem_tol = v;
    }
}
