use crate::error::{Error, Result};
use crate::stats::{linear_fit, linspace, Interval};

use super::profile::{LogProfile, DEFAULT_DT};
use super::EigenvalueSequence;

/// Smallest cap for which the tail windows hold enough profile samples.
pub const MIN_ORDER_CAP: usize = 100;

const WINDOW_STARTS: (f64, f64) = (0.2, 0.5);
const WINDOW_COUNT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderEstimate {
    pub value: f64,
    pub interval: Interval,
}

impl OrderEstimate {
    /// `1/ord` with the interval mapped through the reciprocal.
    pub fn dimension(&self) -> (f64, Interval) {
        (crate::stats::recip(self.value), self.interval.recip())
    }
}

/// `ord = liminf log μ_n / log(1/n)`.
///
/// The value is the least-squares slope of `f(t)` on `[0.2T, T]`; the
/// interval spans the slopes over nested windows `[θT, T]`, `θ ∈ [0.2, 0.5]`.
pub fn order_of_infinitesimal(seq: &EigenvalueSequence) -> Result<OrderEstimate> {
    if seq.cap() < MIN_ORDER_CAP {
        return Err(Error::CapExceeded {
            index: MIN_ORDER_CAP,
            cap: seq.cap(),
        });
    }
    let profile = LogProfile::from_sequence(seq, DEFAULT_DT)?;
    order_from_profile(&profile)
}

pub fn order_from_profile(profile: &LogProfile) -> Result<OrderEstimate> {
    let t_max = profile.t_max();
    let slope_from = |theta: f64| -> Result<f64> {
        let k0 = (theta * t_max / profile.dt).ceil() as usize;
        let ts: Vec<f64> = (k0..profile.f.len()).map(|k| profile.t(k)).collect();
        linear_fit(&ts, &profile.f[k0..])
            .map(|fit| fit.slope)
            .ok_or(Error::GridTooCoarse {
                h: t_max * (1.0 - theta),
                dt: profile.dt,
            })
    };
    let value = slope_from(WINDOW_STARTS.0)?;
    let slopes = linspace(WINDOW_STARTS.0, WINDOW_STARTS.1, WINDOW_COUNT)
        .into_iter()
        .map(slope_from)
        .collect::<Result<Vec<_>>>()?;
    Ok(OrderEstimate {
        value,
        interval: Interval::from_values(slopes).unwrap().hull(value),
    })
}
