use crate::error::{Error, Result};
use crate::stats::{geomspace, linear_fit, CompensatedSum};

use super::EigenvalueSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumKind {
    /// `S_n = Σ_{k≤n} μ_k`.
    NonTraceClass,
    /// `S_n = Σ_{k>n} μ_k`, including the part beyond the cap.
    TraceClass,
}

/// Estimate of `Σ_{k>cap} μ_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    pub remainder: f64,
    pub error: f64,
    /// Fitted decay exponent `a` in `c·n^{-a}`, when a fit was used.
    pub exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialSumSeries {
    pub kind: SumKind,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    /// Tail remainder used for `TraceClass` sums (zero otherwise).
    pub tail: TailEstimate,
}

impl PartialSumSeries {
    /// Nondecreasing for `NonTraceClass`, nonincreasing for `TraceClass`,
    /// with indices taken in increasing order.
    pub fn is_monotone(&self) -> bool {
        let mut pairs: Vec<(usize, f64)> =
            self.indices.iter().copied().zip(self.values.iter().copied()).collect();
        pairs.sort_by_key(|p| p.0);
        pairs.windows(2).all(|w| match self.kind {
            SumKind::NonTraceClass => w[1].1 >= w[0].1,
            SumKind::TraceClass => w[1].1 <= w[0].1,
        })
    }
}

pub fn partial_sums(
    seq: &EigenvalueSequence,
    kind: SumKind,
    indices: &[usize],
) -> Result<PartialSumSeries> {
    if let Some(&bad) = indices.iter().find(|&&n| n > seq.cap()) {
        return Err(Error::CapExceeded {
            index: bad,
            cap: seq.cap(),
        });
    }
    let (values, tail) = match kind {
        SumKind::NonTraceClass => (
            prefix_sums_at(seq, indices),
            TailEstimate {
                remainder: 0.0,
                error: 0.0,
                exponent: None,
            },
        ),
        SumKind::TraceClass => {
            let tail = tail_estimate(seq)?;
            (suffix_sums_at(seq, indices, tail.remainder), tail)
        }
    };
    let series = PartialSumSeries {
        kind,
        indices: indices.to_vec(),
        values,
        tail,
    };
    debug_assert!(series.is_monotone());
    Ok(series)
}

/// `Σ_{k≤n} μ_k` at each requested `n` (any order, `n ≤ cap`), in one pass.
pub(crate) fn prefix_sums_at(seq: &EigenvalueSequence, indices: &[usize]) -> Vec<f64> {
    prefix_sums_with(|k| seq.value(k), indices)
}

/// Prefix sums of an arbitrary term function.
pub(crate) fn prefix_sums_with<F: Fn(usize) -> f64>(term: F, indices: &[usize]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..indices.len()).collect();
    order.sort_by_key(|&i| indices[i]);
    let mut out = vec![0.0; indices.len()];
    let mut acc = CompensatedSum::default();
    let mut k = 0usize;
    for i in order {
        while k < indices[i] {
            k += 1;
            acc.add(term(k));
        }
        out[i] = acc.value();
    }
    out
}

/// `Σ_{k>n} μ_k` at each requested `n`, summing from the cap downwards.
pub(crate) fn suffix_sums_at(seq: &EigenvalueSequence, indices: &[usize], tail: f64) -> Vec<f64> {
    suffix_sums_with(|k| seq.value(k), seq.cap(), indices, tail)
}

pub(crate) fn suffix_sums_with<F: Fn(usize) -> f64>(
    term: F,
    cap: usize,
    indices: &[usize],
    tail: f64,
) -> Vec<f64> {
    let mut order: Vec<usize> = (0..indices.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(indices[i]));
    let mut out = vec![0.0; indices.len()];
    let mut acc = CompensatedSum::default();
    acc.add(tail);
    let mut k = cap;
    for i in order {
        while k > indices[i] {
            acc.add(term(k));
            k -= 1;
        }
        out[i] = acc.value();
    }
    out
}

/// Tail beyond the cap: exact when known, otherwise a power law `c·n^{-a}`
/// fitted on the last decade and integrated from `cap + 1/2`.
pub fn tail_estimate(seq: &EigenvalueSequence) -> Result<TailEstimate> {
    if let Some(r) = seq.closed_tail() {
        if !r.is_finite() {
            return Err(Error::TailUnfittable("closed tail diverges".into()));
        }
        return Ok(TailEstimate {
            remainder: r,
            error: 0.0,
            exponent: None,
        });
    }
    let cap = seq.cap();
    if cap < 20 {
        return Err(Error::TailUnfittable(format!(
            "only {cap} terms available for the fit"
        )));
    }
    let lo = (cap / 10).max(1);
    let mut ns: Vec<usize> = geomspace(lo as f64, cap as f64, 200)
        .into_iter()
        .map(|x| (x.round() as usize).clamp(lo, cap))
        .collect();
    ns.dedup();
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = ns.iter().map(|&n| seq.value(n).ln()).collect();
    let fit = linear_fit(&xs, &ys)
        .ok_or_else(|| Error::TailUnfittable("degenerate fit window".into()))?;
    let a = -fit.slope;
    if !(a.is_finite() && a > 1.0 + 3.0 * fit.slope_se) {
        return Err(Error::TailUnfittable(format!(
            "fitted exponent {a:.4} (se {:.2e}) is not summable",
            fit.slope_se
        )));
    }
    let x0 = cap as f64 + 0.5;
    let rem = |a: f64| fit.intercept.exp() * x0.powf(1.0 - a) / (a - 1.0);
    let remainder = rem(a);
    let lo_a = (a - fit.slope_se).max(1.0 + 0.5 * (a - 1.0));
    let spread = (rem(lo_a) - rem(a + fit.slope_se)).abs() / 2.0;
    let error = spread + remainder * (fit.rms_residual.exp() - 1.0);
    Ok(TailEstimate {
        remainder,
        error,
        exponent: Some(a),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_prefix() {
        let s = EigenvalueSequence::from_fn(|n| 1.0 / n as f64, 10).unwrap();
        let p = partial_sums(&s, SumKind::NonTraceClass, &[4, 0, 1]).unwrap();
        assert!((p.values[0] - 25.0 / 12.0).abs() < 1e-15);
        assert_eq!(p.values[1], 0.0);
        assert_eq!(p.values[2], 1.0);
    }

    #[test]
    fn geometric_tail() {
        let s = EigenvalueSequence::from_fn(|n| 0.5f64.powi(n as i32), 60).unwrap();
        let p = partial_sums(&s, SumKind::TraceClass, &[0, 1, 10]).unwrap();
        assert!((p.values[0] - 1.0).abs() < 1e-15);
        assert!((p.values[1] - 0.5).abs() < 1e-15);
        assert!((p.values[2] / 0.5f64.powi(10) - 1.0).abs() < 1e-12);
        assert!(p.is_monotone());
    }

    #[test]
    fn fitted_power_tail() {
        let s = EigenvalueSequence::from_fn(|n| (n as f64).powi(-2), 10_000).unwrap();
        let t = tail_estimate(&s).unwrap();
        // Σ_{k>N} k^{-2} ≈ 1/N − 1/(2N²)
        let exact = 1.0 / 10_000.0 - 0.5e-8;
        assert!((t.remainder - exact).abs() < 1e-10);
        let p = partial_sums(&s, SumKind::TraceClass, &[0]).unwrap();
        assert!((p.values[0] - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-9);
    }

    #[test]
    fn harmonic_tail_unfittable() {
        let s = EigenvalueSequence::from_fn(|n| 1.0 / n as f64, 1000).unwrap();
        assert!(matches!(
            partial_sums(&s, SumKind::TraceClass, &[1]),
            Err(Error::TailUnfittable(_))
        ));
    }
}
