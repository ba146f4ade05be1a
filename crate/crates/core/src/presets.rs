//! The four worked examples: two quadratics in the plane over the ℓ1 or ℓ2
//! unit ball.

use crate::analysis::{RateModel, ReferenceMode};
use crate::error::{invalid, Result};
use crate::numerics::Matrix;
use crate::objectives::{MultiObjective, QuadraticComponent};
use crate::sets::{FeasibleSet, HalfspacePolytope, NormBall};
use crate::solver::{RunConfig, StartPoint};

pub const PRESET_NAMES: [&str; 4] = ["1a", "1b", "3", "4"];

/// Start point shared by the presets: a vertex of the ℓ1 ball that also lies
/// on the unit circle, away from every Pareto set.
pub const PRESET_START: [f64; 2] = [0.0, 1.0];

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub objective: MultiObjective,
    pub set: FeasibleSet,
    pub config: RunConfig,
    pub reference: ReferenceMode,
    /// Model expected for `ĥ`.
    pub model: RateModel,
}

fn two_shifts(b: [f64; 2], c: [f64; 2]) -> MultiObjective {
    MultiObjective::quadratic(vec![
        QuadraticComponent::shifted_identity(&b),
        QuadraticComponent::shifted_identity(&c),
    ])
    .expect("two planar quadratics")
}

fn config(max_iters: usize) -> RunConfig {
    RunConfig {
        max_iters,
        x0: StartPoint::Given(PRESET_START.to_vec()),
        record_theta_tilde: true,
        ..RunConfig::default()
    }
}

pub fn preset(name: &str) -> Result<Preset> {
    let l1: FeasibleSet = HalfspacePolytope::l1_ball(1.0, vec![0.0, 0.0])?.into();
    let l2: FeasibleSet = NormBall::unit(2.0, 2)?.into();
    let p = match name {
        "1a" => Preset {
            name: "1a",
            description: "½(‖x−b‖², ‖x−c‖²), b = (−0.6,−0.6), c = (−0.5,−0.5), ℓ1 unit ball",
            objective: two_shifts([-0.6, -0.6], [-0.5, -0.5]),
            set: l1,
            config: config(5000),
            reference: ReferenceMode::Analytic(vec![-0.5, -0.5]),
            model: RateModel::Power,
        },
        "1b" => Preset {
            name: "1b",
            description: "½(‖x−b‖², ‖x−c‖²), b = (−0.6,−0.6), c = (−0.01,−0.01), ℓ1 unit ball",
            objective: two_shifts([-0.6, -0.6], [-0.01, -0.01]),
            set: l1,
            config: config(2000),
            reference: ReferenceMode::refine_from(StartPoint::Given(PRESET_START.to_vec())),
            model: RateModel::Geometric,
        },
        "3" => {
            let s = -(0.5_f64.sqrt());
            Preset {
                name: "3",
                description: "½(‖x−b‖², ‖x−c‖²), b = −(1,1)/√2, c = (−0.75,−0.75), ℓ2 unit ball",
                objective: two_shifts([s, s], [-0.75, -0.75]),
                set: l2,
                config: config(5000),
                reference: ReferenceMode::Analytic(vec![s, s]),
                model: RateModel::Power,
            }
        }
        "4" => {
            let a = Matrix::diagonal(&[1.0, 0.0]);
            let objective = MultiObjective::quadratic(vec![
                QuadraticComponent::new(a.clone(), vec![-1.1, 0.0])?,
                QuadraticComponent::new(a, vec![-1.3, 0.0])?,
            ])?;
            Preset {
                name: "4",
                description: "½(‖Ax−b1‖², ‖Ax−b2‖²), A = e1e1ᵀ, b1 = (−1.1,0), b2 = (−1.3,0), ℓ2 unit ball",
                objective,
                set: l2,
                config: config(2000),
                reference: ReferenceMode::Analytic(vec![-1.0, 0.0]),
                model: RateModel::Geometric,
            }
        }
        _ => {
            return Err(invalid(format!(
                "unknown preset {name:?} (expected one of {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(p)
}
