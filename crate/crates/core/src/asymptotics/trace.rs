use crate::error::{Error, Result};
use crate::stats::{linear_fit, linspace, Interval};

use super::eccentricity::{eccentricity_scan_auto, EccentricityScan, DEFAULT_TOLERANCE};
use super::ideal::{classify_ideal, IdealClass};
use super::order::{order_of_infinitesimal, OrderEstimate};
use super::profile::{c_bounds, CBounds, LogProfile, DEFAULT_DT};
use super::sums::{prefix_sums_with, suffix_sums_with, tail_estimate, SumKind};
use super::EigenvalueSequence;

/// Relative band width under which a trace value is called measurable.
pub const MEASURABLE_BAND: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMethod {
    /// `S_{n_k}(B)/S_{n_k}(A)`.
    Ratio,
    /// `(S_{n_{k+1}}(B) − S_{n_k}(B)) / (S_{n_{k+1}}(A) − S_{n_k}(A))`, which
    /// discards the finite-rank head of both sums.
    Increment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEstimate {
    pub value: f64,
    pub band: Interval,
    pub method: TraceMethod,
    /// `(n_k, r_k)` over the late half used for the statistics.
    pub ratios: Vec<(usize, f64)>,
}

impl TraceEstimate {
    pub fn measurable(&self) -> bool {
        self.band.width() < MEASURABLE_BAND * self.value.abs()
    }
}

/// `τ_ω(B) ≈ Lim_ω S_{n_k}(B)/S_{n_k}(A)` with `B` given by its terms `b_k`
/// paired with `μ_k(A)`.
///
/// For `TraceClass` sums the numerator tail beyond the cap is taken as the
/// denominator tail scaled by the mean of `b_k/μ_k` over the last decade.
pub fn singular_trace_estimate<F>(
    numerator: F,
    denominator: &EigenvalueSequence,
    kind: SumKind,
    subseq: &[usize],
    method: TraceMethod,
) -> Result<TraceEstimate>
where
    F: Fn(usize) -> f64,
{
    if subseq.is_empty() {
        return Err(Error::EmptySubsequence);
    }
    if let Some(&n) = subseq.iter().find(|&&n| n > denominator.cap()) {
        return Err(Error::CapExceeded {
            index: n,
            cap: denominator.cap(),
        });
    }
    let mut ns = subseq.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let (sb, sa) = match kind {
        SumKind::NonTraceClass => (
            prefix_sums_with(&numerator, &ns),
            prefix_sums_with(|k| denominator.value(k), &ns),
        ),
        SumKind::TraceClass => {
            let tail = tail_estimate(denominator)?.remainder;
            let cap = denominator.cap();
            let lo = (cap / 10).max(1);
            let w = (lo..=cap)
                .map(|k| numerator(k) / denominator.value(k))
                .sum::<f64>()
                / (cap - lo + 1) as f64;
            (
                suffix_sums_with(&numerator, cap, &ns, w * tail),
                suffix_sums_with(|k| denominator.value(k), cap, &ns, tail),
            )
        }
    };
    let start = ns.len() / 2;
    let ratios: Vec<(usize, f64)> = match method {
        TraceMethod::Ratio => (start..ns.len()).map(|i| (ns[i], sb[i] / sa[i])).collect(),
        TraceMethod::Increment => {
            if ns.len() < 2 {
                return Err(Error::EmptySubsequence);
            }
            let start = start.min(ns.len() - 2);
            (start..ns.len() - 1)
                .filter(|&i| sa[i + 1] != sa[i])
                .map(|i| (ns[i + 1], (sb[i + 1] - sb[i]) / (sa[i + 1] - sa[i])))
                .collect()
        }
    };
    if ratios.is_empty() {
        return Err(Error::EmptySubsequence);
    }
    let value = ratios.iter().map(|r| r.1).sum::<f64>() / ratios.len() as f64;
    let band = Interval::from_values(ratios.iter().map(|r| r.1)).unwrap();
    Ok(TraceEstimate {
        value,
        band,
        method,
        ratios,
    })
}

const DIXMIER_SAMPLES: usize = 400;
const DIXMIER_WINDOWS: usize = 8;

/// Logarithmic trace statistics over the tail window `[√N, N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DixmierEstimate {
    /// Mean of the slopes of `S_n` against `log n` over 8 sub-windows.
    pub value: f64,
    /// Spread of those slopes.
    pub band: Interval,
    /// Log-Cesàro mean of `S_n / log n`.
    pub ratio_value: f64,
    /// `[min, max]` of `S_n / log n` over the tail.
    pub ratio_band: Interval,
}

impl DixmierEstimate {
    pub fn measurable(&self) -> bool {
        self.band.width() < MEASURABLE_BAND * self.value.abs()
    }
}

pub fn dixmier_trace_estimate(seq: &EigenvalueSequence) -> Result<DixmierEstimate> {
    let class = classify_ideal(seq, 1.0)?.classification;
    if matches!(class, IdealClass::L1 | IdealClass::None) {
        return Err(Error::NotL1Weak(class));
    }
    let t_max = (seq.cap() as f64).ln();
    let mut ns: Vec<usize> = linspace(t_max / 2.0, t_max, DIXMIER_SAMPLES)
        .into_iter()
        .map(|t| (t.exp().floor() as usize).clamp(2, seq.cap()))
        .collect();
    ns.dedup();
    let sums = prefix_sums_with(|k| seq.value(k), &ns);
    let logs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ratios: Vec<f64> = sums.iter().zip(&logs).map(|(s, l)| s / l).collect();
    let ratio_value = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let ratio_band = Interval::from_values(ratios.iter().copied()).unwrap();

    let edges = linspace(t_max / 2.0, t_max, DIXMIER_WINDOWS + 1);
    let mut slopes = Vec::with_capacity(DIXMIER_WINDOWS);
    for w in edges.windows(2) {
        let sel: Vec<usize> = (0..ns.len())
            .filter(|&i| logs[i] >= w[0] - 1e-12 && logs[i] <= w[1] + 1e-12)
            .collect();
        let xs: Vec<f64> = sel.iter().map(|&i| logs[i]).collect();
        let ys: Vec<f64> = sel.iter().map(|&i| sums[i]).collect();
        if let Some(fit) = linear_fit(&xs, &ys) {
            slopes.push(fit.slope);
        }
    }
    let band = Interval::from_values(slopes.iter().copied()).ok_or(Error::CapExceeded {
        index: 1000,
        cap: seq.cap(),
    })?;
    Ok(DixmierEstimate {
        value: slopes.iter().sum::<f64>() / slopes.len() as f64,
        band,
        ratio_value,
        ratio_band,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceabilityReport {
    pub order: OrderEstimate,
    pub c_bounds: CBounds,
    /// `1/ord`.
    pub dimension: f64,
    pub dimension_interval: Interval,
    pub classification: IdealClass,
    pub scan: EccentricityScan,
    /// Logarithmic trace of the sequence itself, when it lies in `L^{1,∞}`.
    pub dixmier: Option<DixmierEstimate>,
    /// False when the sequence is outside `L^{1,∞}` and no eccentric index exists.
    pub traceable_at_1: bool,
}

impl TraceabilityReport {
    /// `c̲ − tol ≤ 1/ord ≤ c̄ + tol`, using the reported intervals.
    pub fn sandwich_holds(&self, tol: f64) -> bool {
        let d = self.dimension_interval;
        self.c_bounds.lower_interval.lo - tol <= d.hi && d.lo <= self.c_bounds.upper_interval.hi + tol
    }
}

/// Sum kind matching the ideal classification at exponent 1.
pub fn kind_for(class: IdealClass) -> SumKind {
    if class == IdealClass::L1 {
        SumKind::TraceClass
    } else {
        SumKind::NonTraceClass
    }
}

pub fn analyze(seq: &EigenvalueSequence) -> Result<TraceabilityReport> {
    let order = order_of_infinitesimal(seq)?;
    let cb = c_bounds(&LogProfile::from_sequence(seq, DEFAULT_DT)?)?;
    let (dimension, dimension_interval) = order.dimension();
    let classification = classify_ideal(seq, 1.0)?.classification;
    let scan = eccentricity_scan_auto(seq, DEFAULT_TOLERANCE)?;
    let dixmier = match classification {
        IdealClass::L1Weak | IdealClass::L1Weak0 | IdealClass::Inconclusive => {
            Some(dixmier_trace_estimate(seq)?)
        }
        _ => None,
    };
    let traceable_at_1 = !(classification == IdealClass::None
        && scan.accepted.is_empty()
        && scan.min_gap > scan.tolerance);
    Ok(TraceabilityReport {
        order,
        c_bounds: cb,
        dimension,
        dimension_interval,
        classification,
        scan,
        dixmier,
        traceable_at_1,
    })
}

/// Fails with `NotTraceableAt1` when the report carries no eccentric evidence at exponent 1.
pub fn require_traceable(report: &TraceabilityReport) -> Result<()> {
    if report.traceable_at_1 {
        Ok(())
    } else {
        Err(Error::NotTraceableAt1 {
            min_gap: report.scan.min_gap,
        })
    }
}
