//! Evolution loops: durations after which `U(T) = +/- I`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::evolution::evolve_closed;
use crate::linalg::Mat4;
use crate::model::{reduce, ModelParams, Sign};
use crate::spectral::closed_form_levels;

/// Upper bound on scanned candidates, whatever the horizon.
pub const MAX_CANDIDATES: usize = 2_000_000;
const KEEP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopCandidate {
    pub time: f64,
    /// `U(T)` is closest to `sign * I`.
    pub sign: Sign,
    /// `min_eps |U(T) - eps I|_F`
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoopReport {
    pub horizon: f64,
    pub tol: f64,
    pub scanned: usize,
    /// Exact loops in increasing time.
    pub exact: Vec<LoopCandidate>,
    /// Best approximants ranked by residual per unit time.
    pub approximate: Vec<LoopCandidate>,
    pub best_residual: f64,
}

impl LoopReport {
    /// The first exact loop, or `NoExactLoop` with the best residual seen.
    pub fn require_exact(&self) -> Result<&LoopCandidate> {
        self.exact.first().ok_or(Error::NoExactLoop {
            best_residual: self.best_residual,
        })
    }
}

/// `1000 / max(R_-, R_+)`, or `1000` when both vanish.
pub fn default_horizon(params: &ModelParams) -> f64 {
    let r = reduce(params);
    let top = r.rabi(Sign::Minus).max(r.rabi(Sign::Plus));
    if top > 0.0 {
        1e3 / top
    } else {
        1e3
    }
}

fn loop_residual(u: &Mat4) -> (Sign, f64) {
    let plus = u.dist(&Mat4::identity());
    let minus = (*u + Mat4::identity()).frobenius_norm();
    if minus < plus {
        (Sign::Minus, minus)
    } else {
        (Sign::Plus, plus)
    }
}

/// Scan `T_n = n pi / max|E|` up to the horizon.
///
/// `U(T) = +/- I` forces every `E_k T` into `pi Z`, so these are the only
/// candidates.
pub fn find_evolution_loop(params: &ModelParams, horizon: Option<f64>, tol: f64) -> LoopReport {
    let horizon = horizon.unwrap_or_else(|| default_horizon(params));
    let levels = closed_form_levels(params);
    let top = levels.0.iter().fold(0.0f64, |a, e| a.max(e.abs()));
    let mut report = LoopReport {
        horizon,
        tol,
        scanned: 0,
        exact: Vec::new(),
        approximate: Vec::new(),
        best_residual: f64::INFINITY,
    };
    if top == 0.0 {
        // H = 0: every duration is a loop
        let time = PI.min(horizon);
        report.scanned = 1;
        report.best_residual = 0.0;
        report.exact.push(LoopCandidate {
            time,
            sign: Sign::Plus,
            residual: 0.0,
        });
        return report;
    }
    let step = PI / top;
    let count = ((horizon / step).floor() as usize).min(MAX_CANDIDATES);
    let mut ranked: Vec<(f64, LoopCandidate)> = Vec::new();
    for n in 1..=count {
        let time = n as f64 * step;
        let (sign, residual) = loop_residual(&evolve_closed(params, time).mat);
        report.scanned += 1;
        report.best_residual = report.best_residual.min(residual);
        let cand = LoopCandidate { time, sign, residual };
        if residual < tol {
            if report.exact.len() < KEEP {
                report.exact.push(cand);
            }
        } else {
            ranked.push((residual / time, cand));
        }
    }
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.time.total_cmp(&b.1.time)));
    report.approximate = ranked.into_iter().take(KEEP).map(|(_, c)| c).collect();
    report
}
