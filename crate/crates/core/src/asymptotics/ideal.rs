use crate::error::{Error, Result};
use crate::stats::{geomspace, multi_fit};

use super::{order_of_infinitesimal, EigenvalueSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdealClass {
    /// Trace class: `Σ μ_n < ∞`.
    L1,
    /// `S_n = O(log n)`.
    L1Weak,
    /// `S_n = o(log n)`.
    L1Weak0,
    None,
    Inconclusive,
}

impl IdealClass {
    pub fn name(&self) -> &'static str {
        match self {
            IdealClass::L1 => "L1",
            IdealClass::L1Weak => "L1_WEAK",
            IdealClass::L1Weak0 => "L1_WEAK_0",
            IdealClass::None => "NONE",
            IdealClass::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// Least margin by which the fitted power exponent must clear 1.
pub const MIN_EXPONENT_MARGIN: f64 = 0.01;
/// Least margin for the logarithmic correction exponent.
pub const MIN_LOG_MARGIN: f64 = 0.1;
/// Residual rms of `log μ_n` above which the tail is treated as oscillating.
pub const IRREGULAR_RMS: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct IdealReport {
    pub classification: IdealClass,
    /// Every ideal the sequence is found to belong to, smallest first.
    pub memberships: Vec<IdealClass>,
    /// Fitted `a` in `μ_n ≈ c·n^{-a}·(log n)^{-b}` over the tail `[√N, N]`.
    pub exponent: f64,
    pub exponent_se: f64,
    /// Fitted `b`.
    pub log_exponent: f64,
    pub log_exponent_se: f64,
}

/// Classifies `seq^α` against `L¹ ⊂ L^{1,∞}_0 ⊂ L^{1,∞}`.
///
/// The power exponent decides whenever it clears 1 by three standard errors;
/// otherwise the logarithmic correction `b` does: `b > 1` summable,
/// `0 < b ≤ 1` divergent but `o(log n)`, `b = 0` logarithmic, `b < 0` faster.
/// Oscillating tails, where the fit leaves large residuals, are decided by the
/// order interval alone and are otherwise inconclusive.
pub fn classify_ideal(seq: &EigenvalueSequence, alpha: f64) -> Result<IdealReport> {
    let s = seq.power(alpha)?;
    if s.cap() < 100 {
        return Err(Error::CapExceeded {
            index: 100,
            cap: s.cap(),
        });
    }
    use IdealClass::*;
    if s.is_exhausted() {
        return Ok(IdealReport {
            classification: L1,
            memberships: vec![L1, L1Weak0, L1Weak],
            exponent: f64::INFINITY,
            exponent_se: 0.0,
            log_exponent: 0.0,
            log_exponent_se: 0.0,
        });
    }
    let ns = tail_grid(s.cap(), 256);
    let logs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let loglogs: Vec<f64> = logs.iter().map(|l| l.ln()).collect();
    let logs_copy = logs.clone();
    let ys: Vec<f64> = ns.iter().map(|&n| s.value(n).ln()).collect();
    let (beta, se) = multi_fit(&[vec![1.0; ns.len()], logs, loglogs], &ys)
        .ok_or_else(|| Error::InvalidSpec("degenerate tail fit".into()))?;
    let (a, b) = (-beta[1], -beta[2]);
    let m_a = (3.0 * se[1]).max(MIN_EXPONENT_MARGIN);
    let m_b = (3.0 * se[2]).max(MIN_LOG_MARGIN);
    let rms = (ys
        .iter()
        .enumerate()
        .map(|(i, y)| {
            let fit = beta[0] + beta[1] * logs_copy[i] + beta[2] * logs_copy[i].ln();
            (y - fit).powi(2)
        })
        .sum::<f64>()
        / ys.len() as f64)
        .sqrt();

    let (classification, memberships) = if rms > IRREGULAR_RMS {
        let ord = order_of_infinitesimal(&s)?.interval;
        if ord.lo > 1.0 + MIN_EXPONENT_MARGIN {
            (L1, vec![L1, L1Weak0, L1Weak])
        } else if ord.hi < 1.0 - MIN_EXPONENT_MARGIN {
            (None, vec![])
        } else {
            (Inconclusive, vec![])
        }
    } else if a > 1.0 + m_a || (a >= 1.0 - m_a && b > 1.0 + m_b) {
        (L1, vec![L1, L1Weak0, L1Weak])
    } else if a < 1.0 - m_a || b < -m_b {
        (None, vec![])
    } else if b.abs() <= m_b {
        (L1Weak, vec![L1Weak])
    } else if b > m_b {
        // Both sides of b = 1 lie in L^{1,∞}_0.
        (L1Weak0, vec![L1Weak0, L1Weak])
    } else {
        (Inconclusive, vec![])
    };
    Ok(IdealReport {
        classification,
        memberships,
        exponent: a,
        exponent_se: se[1],
        log_exponent: b,
        log_exponent_se: se[2],
    })
}

/// Distinct indices geometrically spaced over `[√N, N]`.
pub(crate) fn tail_grid(cap: usize, count: usize) -> Vec<usize> {
    let lo = (cap as f64).sqrt();
    let mut ns: Vec<usize> = geomspace(lo, cap as f64, count)
        .into_iter()
        .map(|x| (x.floor() as usize).clamp(1, cap))
        .collect();
    ns.dedup();
    ns
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq<F: Fn(usize) -> f64 + Send + Sync + 'static>(f: F) -> EigenvalueSequence {
        EigenvalueSequence::from_fn(f, 1_000_000).unwrap()
    }

    #[test]
    fn harmonic_is_weak() {
        let s = seq(|n| 1.0 / n as f64);
        assert_eq!(classify_ideal(&s, 1.0).unwrap().classification, IdealClass::L1Weak);
        assert_eq!(classify_ideal(&s, 2.0).unwrap().classification, IdealClass::L1);
        assert_eq!(classify_ideal(&s, 0.5).unwrap().classification, IdealClass::None);
    }

    #[test]
    fn log_squared_is_trace_class() {
        let s = seq(|n| {
            let l = ((n + 1) as f64).ln();
            1.0 / (n as f64 * l * l)
        });
        let r = classify_ideal(&s, 1.0).unwrap();
        assert_eq!(r.classification, IdealClass::L1);
        assert!(r.memberships.contains(&IdealClass::L1Weak0));
    }

    #[test]
    fn log_times_harmonic_is_none() {
        let s = seq(|n| ((n + 2) as f64).ln() / (n + 2) as f64);
        assert_eq!(classify_ideal(&s, 1.0).unwrap().classification, IdealClass::None);
    }

    #[test]
    fn harmonic_over_log_is_weak_zero() {
        let s = seq(|n| 1.0 / ((n + 2) as f64 * ((n + 2) as f64).ln()));
        assert_eq!(classify_ideal(&s, 1.0).unwrap().classification, IdealClass::L1Weak0);
        let s = seq(|n| 1.0 / ((n + 2) as f64 * ((n + 2) as f64).ln().sqrt()));
        assert_eq!(classify_ideal(&s, 1.0).unwrap().classification, IdealClass::L1Weak0);
    }

    #[test]
    fn finite_is_trace_class() {
        let s = EigenvalueSequence::from_values(vec![1.0; 200]).unwrap();
        assert_eq!(classify_ideal(&s, 1.0).unwrap().classification, IdealClass::L1);
    }
}
