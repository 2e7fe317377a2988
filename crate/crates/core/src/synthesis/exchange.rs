//! Exchange pulses: a sector equal to `+/- sigma_1` or `+/- i sigma_2` up to phase,
//! swapping one Bell pair.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use crate::error::{Error, Result};
use crate::evolution::{sector_index_of, sector_rows};
use crate::group::PulseSpec;
use crate::model::{reduce, Axis, ModelParams, Sign};

/// Slack on `|b| = 1` when deciding a template is exchange capable.
pub const EXCHANGE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExchangeSolution {
    pub pulse: PulseSpec,
    /// Sector index (0 or 1) that performs the swap.
    pub sector: usize,
    /// The swapped Bell rows.
    pub rows: (usize, usize),
    /// `|<row_l| U |row_k>|`, which is 1 for a perfect swap.
    pub amplitude: f64,
}

/// Find the shortest duration at which `params` swaps a Bell pair.
///
/// Only the sector whose coupling pair vanishes has `|b| = 1`; any other
/// sector is bounded by `|d| <= |b| < 1` and can never fully exchange.
pub fn find_exchange(params: &ModelParams, horizon: Option<f64>) -> Result<ExchangeSolution> {
    let r = reduce(params);
    let mut ceiling = 0.0f64;
    let mut best: Option<(f64, Sign)> = None;
    for alpha in Sign::ALL {
        let driver = alpha.flip();
        let b = r.b(driver).abs();
        ceiling = ceiling.max(b);
        let rabi = r.rabi(driver);
        if rabi > 0.0 && (b - 1.0).abs() <= EXCHANGE_TOL {
            let t = FRAC_PI_2 / rabi;
            if best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, alpha));
            }
        }
    }
    let (t, alpha) = best.ok_or(Error::InfeasibleParams { ceiling })?;
    if let Some(h) = horizon {
        if t > h {
            return Err(Error::Infeasible(format!(
                "exchange needs t = {t:.6}, beyond horizon {h}"
            )));
        }
    }
    let pulse = PulseSpec::new(*params, t)?;
    let sector = sector_index_of(params.axis, alpha);
    let rows = sector_rows(params.axis, sector);
    let u = pulse.unitary().mat;
    let amplitude = u.0[rows.1][rows.0].norm();
    Ok(ExchangeSolution {
        pulse,
        sector,
        rows,
        amplitude,
    })
}

/// A pulse whose `alpha` sector has `|j| = |b| = 1/sqrt(2)` at `sin(Delta-) = 1`.
///
/// Up to phase the sector is `(sigma_z-like + sigma_xy-like)/sqrt(2)`, a Hadamard-like gate.
pub fn hadamard_like(axis: Axis, alpha: Sign, rabi: f64) -> Result<PulseSpec> {
    if !(rabi.is_finite() && rabi > 0.0) {
        return Err(Error::InvalidParams(format!("rabi frequency must be positive, got {rabi}")));
    }
    let component = FRAC_1_SQRT_2 * rabi;
    let mut field = [0.0; 2];
    let mut pair = [0.0; 2];
    field[alpha.flip().slot()] = component;
    pair[alpha.slot()] = component;
    let params = ModelParams::from_sums(axis, 0.0, field, pair)?;
    PulseSpec::new(params, FRAC_PI_2 / rabi)
}
