use crate::error::{Error, Result};
use crate::stats::Interval;

use super::EigenvalueSequence;

pub const DEFAULT_DT: f64 = 0.01;

/// Samples of `f(t) = −log μ(e^t)` on the grid `t_k = k·dt`, with `μ(x) = μ_n` for `x ∈ [n, n+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogProfile {
    pub dt: f64,
    pub f: Vec<f64>,
}

impl LogProfile {
    pub fn from_sequence(seq: &EigenvalueSequence, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidSpec(format!("grid step must be positive, got {dt}")));
        }
        let t_max = (seq.cap() as f64).ln();
        let steps = (t_max / dt).floor() as usize;
        let f = (0..=steps)
            .map(|k| {
                let n = ((k as f64 * dt).exp().floor() as usize).clamp(1, seq.cap());
                -seq.value(n).ln()
            })
            .collect();
        Ok(LogProfile { dt, f })
    }

    /// Profile of an explicit function `f` on `[0, t_max]`.
    pub fn from_fn<F: Fn(f64) -> f64>(f: F, t_max: f64, dt: f64) -> Self {
        let steps = (t_max / dt).floor() as usize;
        LogProfile {
            dt,
            f: (0..=steps).map(|k| f(k as f64 * dt)).collect(),
        }
    }

    pub fn t_max(&self) -> f64 {
        (self.f.len() - 1) as f64 * self.dt
    }

    pub fn t(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }
}

/// Reciprocal oscillation bounds `c̲ ≤ c̄` of the log profile.
#[derive(Debug, Clone, PartialEq)]
pub struct CBounds {
    pub lower: f64,
    pub upper: f64,
    pub lower_interval: Interval,
    pub upper_interval: Interval,
    /// Window length `h` at which the bounds were read.
    pub h: f64,
    /// Set when single jumps of `f` dominate the increments at every scale.
    pub jump_dominated: bool,
    /// Largest finite value the grid can resolve for `c̄`; `upper` is `∞` beyond it.
    pub upper_grid_max: f64,
}

struct Quotients {
    h: f64,
    max_inc: f64,
    min_inc: f64,
}

fn quotients(p: &LogProfile, steps: usize) -> Option<Quotients> {
    let n = p.f.len();
    let start = (n - 1) / 2;
    let mut max_inc = f64::NEG_INFINITY;
    let mut min_inc = f64::INFINITY;
    for end in start.max(steps)..n {
        let inc = p.f[end] - p.f[end - steps];
        max_inc = max_inc.max(inc);
        min_inc = min_inc.min(inc);
    }
    if max_inc.is_finite() {
        Some(Quotients {
            h: steps as f64 * p.dt,
            max_inc,
            min_inc: min_inc.max(0.0),
        })
    } else {
        None
    }
}

fn lower_of(q: &Quotients) -> f64 {
    if q.max_inc <= 0.0 {
        f64::INFINITY
    } else {
        q.h / q.max_inc
    }
}

fn upper_of(q: &Quotients) -> f64 {
    if q.min_inc <= 0.0 {
        f64::INFINITY
    } else {
        q.h / q.min_inc
    }
}

/// `c̲ = (lim_h limsup_t (f(t+h)−f(t))/h)^{-1}` and `c̄` with liminf, read off
/// at the working scale `h = T/4` over windows ending in the tail `[T/2, T]`.
pub fn c_bounds(profile: &LogProfile) -> Result<CBounds> {
    let t_max = profile.t_max();
    let dt = profile.dt;
    let h_star = t_max / 4.0;
    if h_star < 2.0 * dt {
        return Err(Error::GridTooCoarse { h: h_star, dt });
    }
    let steps_of = |h: f64| ((h / dt).round() as usize).max(2);
    let at = |h: f64| quotients(profile, steps_of(h)).ok_or(Error::GridTooCoarse { h, dt });

    let centre = at(h_star)?;
    let below = at(h_star / 1.25)?;
    let above = at((h_star * 1.25).min(t_max / 2.0))?;
    let fine = at(2.0 * dt)?;
    let fine2 = at(4.0 * dt)?;

    let jump_dominated = fine.max_inc > 0.0 && fine.max_inc >= 0.5 * centre.max_inc;
    let (lower, lower_interval) = if jump_dominated {
        let a = lower_of(&fine);
        (a, Interval::new(a, lower_of(&fine2)))
    } else {
        let a = lower_of(&centre);
        (
            a,
            Interval::from_values([a, lower_of(&below), lower_of(&above)]).unwrap(),
        )
    };
    let upper = upper_of(&centre);
    let upper_interval =
        Interval::from_values([upper, upper_of(&below), upper_of(&above)]).unwrap();
    Ok(CBounds {
        lower,
        upper,
        lower_interval,
        upper_interval,
        h: centre.h,
        jump_dominated,
        upper_grid_max: centre.h / dt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_profile_has_equal_bounds() {
        let p = LogProfile::from_fn(|t| 1.5 * t, 14.0, 0.01);
        let c = c_bounds(&p).unwrap();
        assert!((c.lower - 1.0 / 1.5).abs() < 1e-9);
        assert!((c.upper - 1.0 / 1.5).abs() < 1e-9);
        assert!(!c.jump_dominated);
    }

    #[test]
    fn flat_profile_gives_infinite_upper() {
        let p = LogProfile::from_fn(|t| if t < 5.0 { t } else { 5.0 }, 14.0, 0.01);
        let c = c_bounds(&p).unwrap();
        assert!(c.upper.is_infinite());
    }

    #[test]
    fn short_grid_is_rejected() {
        let p = LogProfile::from_fn(|t| t, 0.05, 0.01);
        assert!(matches!(c_bounds(&p), Err(Error::GridTooCoarse { .. })));
    }

    #[test]
    fn profile_of_harmonic() {
        let s = EigenvalueSequence::from_fn(|n| 1.0 / n as f64, 1000).unwrap();
        let p = LogProfile::from_sequence(&s, 0.01).unwrap();
        assert!(p.f.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(p.f[0], 0.0);
        assert!((p.t_max() - 1000f64.ln()).abs() < 0.01);
    }
}
