use std::fmt;

use super::reference::ReferencePoint;
use crate::error::{invalid, Error, Result};
use crate::numerics::linear_fit;
use crate::solver::RunHistory;

/// `ĥ` below this is reported as a reference inconsistency.
pub const NEGATIVE_MERIT_TOL: f64 = 1e-9;
pub const MIN_FIT_POINTS: usize = 10;
/// Fraction of the usable points kept by the default tail window.
pub const TAIL_FRACTION: f64 = 0.6;

#[derive(Debug, Clone, PartialEq)]
pub struct MeritSeries {
    pub k: Vec<usize>,
    /// `ĥ(x^k) = min_j (F_j(x^k) − F_j(x*))`.
    pub h_hat: Vec<f64>,
    /// `h_j(x^k)` per record.
    pub components: Vec<Vec<f64>>,
    /// Iterations where `ĥ < −1e-9`.
    pub negative: Vec<usize>,
}

impl MeritSeries {
    pub fn from_values(k: Vec<usize>, h_hat: Vec<f64>) -> Result<Self> {
        if k.len() != h_hat.len() {
            return Err(invalid("merit series needs one value per iteration"));
        }
        let negative = k
            .iter()
            .zip(&h_hat)
            .filter(|(_, h)| **h < -NEGATIVE_MERIT_TOL)
            .map(|(k, _)| *k)
            .collect();
        Ok(Self {
            components: h_hat.iter().map(|h| vec![*h]).collect(),
            k,
            h_hat,
            negative,
        })
    }

    /// `10³ · ε · max(1, ĥ(x⁰))`.
    pub fn noise_floor(&self) -> f64 {
        let h0 = self.h_hat.first().copied().unwrap_or(0.0);
        1e3 * f64::EPSILON * h0.max(1.0)
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }
}

pub fn merit_series(history: &RunHistory, reference: &ReferencePoint) -> Result<MeritSeries> {
    if history.fingerprint != reference.fingerprint {
        return Err(Error::InvalidPairing(format!(
            "history fingerprint {} but reference fingerprint {}",
            history.fingerprint, reference.fingerprint
        )));
    }
    let mut k = Vec::with_capacity(history.records.len());
    let mut h_hat = Vec::with_capacity(history.records.len());
    let mut components = Vec::with_capacity(history.records.len());
    for r in &history.records {
        if r.f_values.len() != reference.f_star.len() {
            return Err(Error::InvalidPairing(format!(
                "record {} has {} objective values, reference has {}",
                r.k,
                r.f_values.len(),
                reference.f_star.len()
            )));
        }
        let h: Vec<f64> = r
            .f_values
            .iter()
            .zip(&reference.f_star)
            .map(|(f, s)| f - s)
            .collect();
        k.push(r.k);
        h_hat.push(h.iter().copied().fold(f64::INFINITY, f64::min));
        components.push(h);
    }
    let mut s = MeritSeries::from_values(k, h_hat)?;
    s.components = components;
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateModel {
    /// `ĥ_k ≈ C ρ^k`; the parameter is `ρ`.
    Geometric,
    /// `ĥ_k ≈ C k^s`; the parameter is `s`.
    Power,
}

impl fmt::Display for RateModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RateModel::Geometric => "geometric",
            RateModel::Power => "power",
        })
    }
}

impl std::str::FromStr for RateModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geometric" => Ok(RateModel::Geometric),
            "power" => Ok(RateModel::Power),
            _ => Err(invalid(format!("unknown rate model {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FitWindow {
    /// Last 60% of the points above the noise floor.
    #[default]
    Tail,
    /// Iterations `lo..=hi`, points above the noise floor only.
    Range(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub model: RateModel,
    pub window: (usize, usize),
    pub parameter: f64,
    pub r2: f64,
    pub points: usize,
}

impl fmt::Display for RateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.model {
            RateModel::Geometric => "ratio",
            RateModel::Power => "exponent",
        };
        write!(
            f,
            "model={} window={}:{} points={} {}={:.6} r2={:.6}",
            self.model, self.window.0, self.window.1, self.points, name, self.parameter, self.r2
        )
    }
}

pub fn fit_rate(series: &MeritSeries, model: RateModel, window: FitWindow) -> Result<RateReport> {
    let floor = series.noise_floor();
    let mut pts: Vec<(usize, f64)> = series
        .k
        .iter()
        .zip(&series.h_hat)
        .filter(|(k, h)| **h > floor && (model == RateModel::Geometric || **k >= 1))
        .map(|(k, h)| (*k, *h))
        .collect();
    match window {
        FitWindow::Tail => {
            let keep = (TAIL_FRACTION * pts.len() as f64).ceil() as usize;
            pts.drain(..pts.len() - keep);
        }
        FitWindow::Range(lo, hi) => {
            if lo > hi {
                return Err(invalid(format!("empty window {lo}:{hi}")));
            }
            pts.retain(|(k, _)| (lo..=hi).contains(k));
        }
    }
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            needed: MIN_FIT_POINTS,
            got: pts.len(),
        });
    }
    let xs: Vec<f64> = pts
        .iter()
        .map(|(k, _)| match model {
            RateModel::Geometric => *k as f64,
            RateModel::Power => (*k as f64).ln(),
        })
        .collect();
    let ys: Vec<f64> = pts.iter().map(|(_, h)| h.ln()).collect();
    let fit = linear_fit(&xs, &ys)?;
    Ok(RateReport {
        model,
        window: (pts[0].0, pts[pts.len() - 1].0),
        parameter: match model {
            RateModel::Geometric => fit.slope.exp(),
            RateModel::Power => fit.slope,
        },
        r2: fit.r2,
        points: pts.len(),
    })
}

/// `θ_best(k) = min_{⌊k/2⌋ <= i <= k} |θ^FW(x^i)|` for `k >= 1`.
pub fn theta_best_series(history: &RunHistory) -> Vec<(usize, f64)> {
    let abs: Vec<f64> = history.records.iter().map(|r| r.theta_fw.abs()).collect();
    (1..abs.len())
        .map(|k| {
            let best = abs[k / 2..=k].iter().copied().fold(f64::INFINITY, f64::min);
            (history.records[k].k, best)
        })
        .collect()
}
