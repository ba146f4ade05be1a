//! Merit series, rate fits, rate envelopes and inequality checks on
//! recorded runs.

mod envelope;
mod rates;
mod reference;
mod verify;

pub use envelope::{recursion_envelope, recursion_k0, CertificateConstants};
pub use rates::{
    fit_rate, merit_series, theta_best_series, FitWindow, MeritSeries, RateModel, RateReport,
    MIN_FIT_POINTS, NEGATIVE_MERIT_TOL, TAIL_FRACTION,
};
pub use reference::{
    compute_reference, Provenance, ReferenceMode, ReferencePoint, ANALYTIC_STATIONARITY_TOL,
    DEFAULT_REFINE_TOL, MAX_REFINE_ITERS,
};
pub use verify::{verify_inequalities, Check, CheckResult, CheckStatus, VerifyReport, VERIFY_REL_TOL};

use crate::solver::RunHistory;

/// `min_k |θ̃(x^k)|` over the records, when every record carries `θ̃`.
pub fn measured_c_lower(history: &RunHistory) -> Option<f64> {
    history
        .records
        .iter()
        .map(|r| r.theta_tilde.map(f64::abs))
        .try_fold(f64::INFINITY, |acc, v| v.map(|v| acc.min(v)))
}

/// Largest `ĥ_{k+1} / ĥ_k` over pairs with `ĥ_k` above the noise floor.
pub fn max_contraction(series: &MeritSeries) -> Option<f64> {
    let floor = series.noise_floor();
    series
        .h_hat
        .windows(2)
        .filter(|w| w[0] > floor)
        .map(|w| w[1].max(0.0) / w[0])
        .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))))
}
