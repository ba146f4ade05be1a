//! Multiobjective Frank-Wolfe (M-FW) for convex constrained problems
//! `min F(x) = (F_1(x), …, F_m(x))` over a compact convex set, with the
//! analysis tools used to check its convergence behaviour.
//!
//! ```
//! use mfw_core::{presets, run};
//!
//! let p = presets::preset("1b").unwrap();
//! let h = run(&p.objective, &p.set, &p.config).unwrap();
//! assert!(h.last().theta_fw.abs() <= 1e-12);
//! ```

pub mod analysis;
pub mod error;
pub mod grid_oracle;
pub mod numerics;
pub mod objectives;
pub mod presets;
pub mod sets;
pub mod solver;
pub mod subproblem;

pub use error::{Error, Result};
pub use numerics::{Matrix, PNorm};
pub use objectives::{Component, CustomComponent, MultiObjective, QuadraticComponent};
pub use sets::{FeasibleSet, HalfspacePolytope, LmoResult, NormBall, UniformConvexityInfo};
pub use solver::{
    default_start, mfw_step, run, IterateRecord, RunConfig, RunHistory, StartPoint, StepType,
    Termination,
};
pub use subproblem::{min_norm_point, solve_minmax, theta_tilde, MinMaxResult, MinMaxSolver};
