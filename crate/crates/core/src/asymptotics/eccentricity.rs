use crate::error::{Error, Result};
use crate::stats::linear_fit;

use super::ideal::{classify_ideal, IdealClass};
use super::sums::{prefix_sums_at, suffix_sums_at, tail_estimate, SumKind};
use super::EigenvalueSequence;

pub const DEFAULT_TOLERANCE: f64 = 0.02;
pub const GRID_RATIO: f64 = 1.1;
const GRID_START: f64 = 10.0;
// μ_{n+1}/μ_n below this marks n as a jump index worth scanning.
const DROP_RATIO: f64 = 0.5;

/// `gap ≈ intercept + slope / log n`, fitted over the late half of the scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapTrend {
    pub intercept: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EccentricityScan {
    pub kind: SumKind,
    pub tolerance: f64,
    pub scanned: Vec<usize>,
    /// `|S_{2n}/S_n − 1|` per scanned `n`.
    pub gaps: Vec<f64>,
    pub accepted: Vec<usize>,
    pub min_gap: f64,
    pub min_gap_at: usize,
    pub trend: Option<GapTrend>,
}

impl EccentricityScan {
    /// Gaps decay like `1/log n` towards a limit within tolerance, as for
    /// logarithmically divergent sums whose gaps are still above tolerance at the cap.
    /// A negative extrapolated limit counts as zero since gaps are nonnegative.
    pub fn trend_eccentric(&self) -> bool {
        self.trend
            .map(|t| t.slope > 0.0 && t.intercept <= self.tolerance)
            .unwrap_or(false)
    }

    /// Indices along which traces are evaluated: the accepted ones, or the
    /// late half of the scan when only the trend is eccentric.
    pub fn trace_subsequence(&self) -> Result<Vec<usize>> {
        if !self.accepted.is_empty() {
            return Ok(self.accepted.clone());
        }
        if self.trend_eccentric() {
            let start = late_half_start(&self.scanned);
            return Ok(self.scanned[start..].to_vec());
        }
        Err(Error::EmptySubsequence)
    }
}

fn late_half_start(ns: &[usize]) -> usize {
    let last = *ns.last().unwrap_or(&1) as f64;
    ns.iter().position(|&n| n as f64 >= last.sqrt()).unwrap_or(0)
}

/// Geometric grid (ratio 1.1) plus jump indices, all with `2n ≤ cap`.
pub fn scan_grid(seq: &EigenvalueSequence) -> Vec<usize> {
    let half = seq.cap() / 2;
    let mut ns = Vec::new();
    let mut x = GRID_START;
    while (x as usize) <= half {
        ns.push(x as usize);
        x *= GRID_RATIO;
    }
    if half >= 1 {
        let mut prev = seq.value(1);
        for n in 1..half {
            let next = seq.value(n + 1);
            if next < DROP_RATIO * prev {
                ns.push(n);
            }
            prev = next;
        }
    }
    ns.sort_unstable();
    ns.dedup();
    ns
}

pub fn eccentricity_scan(
    seq: &EigenvalueSequence,
    kind: SumKind,
    tolerance: f64,
) -> Result<EccentricityScan> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidSpec(format!("tolerance must be positive, got {tolerance}")));
    }
    let ns = scan_grid(seq);
    if ns.is_empty() {
        return Err(Error::CapExceeded {
            index: 2,
            cap: seq.cap(),
        });
    }
    let mut idx: Vec<usize> = ns.clone();
    idx.extend(ns.iter().map(|n| 2 * n));
    let sums = match kind {
        SumKind::NonTraceClass => prefix_sums_at(seq, &idx),
        SumKind::TraceClass => suffix_sums_at(seq, &idx, tail_estimate(seq)?.remainder),
    };
    let m = ns.len();
    let gaps: Vec<f64> = (0..m).map(|i| (sums[m + i] / sums[i] - 1.0).abs()).collect();
    let accepted = ns
        .iter()
        .zip(&gaps)
        .filter(|(_, &g)| g < tolerance)
        .map(|(&n, _)| n)
        .collect();
    let (imin, &min_gap) = gaps
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let start = late_half_start(&ns);
    let trend = if m - start >= 3 {
        let xs: Vec<f64> = ns[start..].iter().map(|&n| 1.0 / (n as f64).ln()).collect();
        linear_fit(&xs, &gaps[start..]).map(|f| GapTrend {
            intercept: f.intercept,
            slope: f.slope,
        })
    } else {
        None
    };
    Ok(EccentricityScan {
        kind,
        tolerance,
        min_gap_at: ns[imin],
        scanned: ns,
        gaps,
        accepted,
        min_gap,
        trend,
    })
}

/// Scan with the sum kind chosen from the ideal classification. Trace-class
/// sequences whose tail can be neither summed nor fitted are scanned through
/// their prefix sums.
pub fn eccentricity_scan_auto(seq: &EigenvalueSequence, tolerance: f64) -> Result<EccentricityScan> {
    let class = classify_ideal(seq, 1.0)?.classification;
    if class != IdealClass::L1 {
        return eccentricity_scan(seq, SumKind::NonTraceClass, tolerance);
    }
    match eccentricity_scan(seq, SumKind::TraceClass, tolerance) {
        Err(Error::TailUnfittable(_)) => eccentricity_scan(seq, SumKind::NonTraceClass, tolerance),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_gap_is_log2_over_log_n() {
        let s = EigenvalueSequence::from_fn(|n| 1.0 / n as f64, 1_000_000).unwrap();
        let scan = eccentricity_scan(&s, SumKind::NonTraceClass, 0.07).unwrap();
        // S_{2n} − S_n ≈ log 2 and S_n ≈ log n + γ
        for (&n, &g) in scan.scanned.iter().zip(&scan.gaps).skip(20) {
            let oracle = std::f64::consts::LN_2 / ((n as f64).ln() + 0.5772156649);
            assert!((g - oracle).abs() < 0.1 * oracle, "n={n}: {g} vs {oracle}");
        }
        assert!(scan.trend_eccentric());
        assert!(!scan.accepted.is_empty());
    }

    #[test]
    fn geometric_not_eccentric() {
        let s = EigenvalueSequence::from_fn(|n| 0.5f64.powi(n as i32), 200).unwrap();
        let scan = eccentricity_scan(&s, SumKind::TraceClass, 0.1).unwrap();
        assert!(scan.accepted.is_empty());
        assert!(scan.min_gap > 0.9);
        assert!(matches!(scan.trace_subsequence(), Err(Error::EmptySubsequence)));
    }
}
