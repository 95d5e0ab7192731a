use crate::asymptotics::{
    classify_ideal, dixmier_trace_estimate, eccentricity_scan, kind_for, singular_trace_estimate,
    tail_estimate, DixmierEstimate, TailEstimate, TraceEstimate, TraceMethod, DEFAULT_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::fractal_geometry::{is_lattice, minkowski_content_estimate, MinkowskiEstimate};
use crate::stats::{CompensatedSum, Interval};

use super::functional::FunctionalSample;
use super::gap::GapTripleModel;
use super::model::SpectralModel;
use super::pair::PairTripleModel;

/// Truncated `ζ(s) = Σ_k μ_k^s` with its remainder.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaPartial {
    pub s: f64,
    pub cap: usize,
    pub truncated: f64,
    pub tail: TailEstimate,
    pub value: f64,
    pub closed_form: Option<f64>,
}

pub fn zeta_partial<M: SpectralModel + ?Sized>(model: &M, s: f64, cap: Option<usize>) -> Result<ZetaPartial> {
    let d = model.reference_dimension()?;
    if !(s > d) {
        return Err(Error::SBelowDimension { s, d });
    }
    zeta_partial_above(model, s, cap, None)
}

fn zeta_partial_above<M: SpectralModel + ?Sized>(
    model: &M,
    s: f64,
    cap: Option<usize>,
    closed_form: Option<f64>,
) -> Result<ZetaPartial> {
    let full = model.eigen();
    let cap = cap.unwrap_or(full.cap());
    if cap > full.cap() {
        return Err(Error::CapExceeded { index: cap, cap: full.cap() });
    }
    let powered = full.power(s)?;
    let mut head = CompensatedSum::default();
    let mut rest = CompensatedSum::default();
    for (k, v) in powered.iter().enumerate() {
        if k < cap {
            head.add(v);
        } else {
            rest.add(v);
        }
    }
    // beyond the model cap: closed form if known, else a fit on the full table
    let mut tail = tail_estimate(&powered)?;
    tail.remainder += rest.value();
    let truncated = head.value();
    Ok(ZetaPartial {
        s,
        cap,
        truncated,
        value: truncated + tail.remainder,
        tail,
        closed_form,
    })
}

/// Pair-triple variant that also reports the closed form.
pub fn pair_zeta_partial(model: &PairTripleModel, s: f64, cap: Option<usize>) -> Result<ZetaPartial> {
    let d = model.reference_dimension()?;
    if !(s > d) {
        return Err(Error::SBelowDimension { s, d });
    }
    zeta_partial_above(model, s, cap, model.zeta_closed_form(s))
}

/// `L = lim_{s↓d} (s − d)ζ(s)` by the derivative formula and by
/// extrapolating `h·ζ(d + h)` to `h = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaResidue {
    pub d: f64,
    pub analytic: f64,
    pub numeric: f64,
    /// Difference of the last two extrapolants.
    pub numeric_error: f64,
    /// `h` grid and `h·ζ(d + h)` values.
    pub samples: Vec<(f64, f64)>,
}

const RESIDUE_H0: f64 = 0.05;
const RESIDUE_STEPS: usize = 9;

pub fn zeta_residue(model: &PairTripleModel, d: f64) -> Result<ZetaResidue> {
    let ratios = model
        .stationary_ratios()
        .ok_or_else(|| Error::InvalidSpec("zeta residue needs a stationary IFS".into()))?;
    let slope: f64 = ratios.iter().map(|r| r.powf(d) * (1.0 / r).ln()).sum();
    let analytic = 2.0 * model.seed_distance().powf(d) / slope;
    let mut samples = Vec::with_capacity(RESIDUE_STEPS);
    for k in 0..RESIDUE_STEPS {
        let h = RESIDUE_H0 / 2f64.powi(k as i32);
        let z = model
            .zeta_closed_form(d + h)
            .ok_or(Error::SBelowDimension { s: d + h, d })?;
        samples.push((h, h * z));
    }
    let (numeric, numeric_error) = neville_at_zero(&samples);
    Ok(ZetaResidue {
        d,
        analytic,
        numeric,
        numeric_error,
        samples,
    })
}

/// Polynomial extrapolation to 0; returns the value and the last correction.
fn neville_at_zero(samples: &[(f64, f64)]) -> (f64, f64) {
    let n = samples.len();
    let mut p: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let mut last = (p[n - 1], f64::INFINITY);
    for m in 1..n {
        for i in 0..n - m {
            let (hi, hj) = (samples[i].0, samples[i + m].0);
            p[i] = (hj * p[i] - hi * p[i + 1]) / (hj - hi);
        }
        let err = (p[n - m - 1] - last.0).abs();
        last = (p[n - m - 1], err);
    }
    last
}

/// `τ(f|D|^{-d})/τ(|D|^{-d})` along an eccentric subsequence.
pub fn hausdorff_functional<M: SpectralModel + ?Sized>(
    model: &M,
    f: &FunctionalSample,
    d: f64,
    subseq: Option<&[usize]>,
    method: TraceMethod,
) -> Result<TraceEstimate> {
    let denom = model.eigen().power(d)?;
    if f.values.len() < denom.cap() {
        return Err(Error::UndefinedTag { index: f.values.len() + 1 });
    }
    let kind = kind_for(classify_ideal(&denom, 1.0)?.classification);
    let owned;
    let ns = match subseq {
        Some(ns) => ns,
        None => {
            owned = eccentricity_scan(&denom, kind, DEFAULT_TOLERANCE)?.trace_subsequence()?;
            &owned
        }
    };
    singular_trace_estimate(
        |k| f.values[k - 1] * denom.value(k),
        &denom,
        kind,
        ns,
        method,
    )
}

/// Relative Minkowski band under which equality of both sides is asserted.
pub const LINK_BAND: f64 = 0.05;

/// Both sides of `Tr_ω(|D|^{-d}) = 2^d(1−d)M_d(F)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkCheck {
    pub d: f64,
    pub trace: DixmierEstimate,
    pub minkowski: MinkowskiEstimate,
    pub rhs_value: f64,
    pub rhs_band: Interval,
    /// Lattice type of the source IFS, when known.
    pub lattice: Option<bool>,
    pub overlap: bool,
    /// Whether the bands are expected to overlap (non-lattice and a narrow Minkowski band).
    pub asserted: bool,
}

pub fn minkowski_link_check(model: &GapTripleModel, d: f64) -> Result<LinkCheck> {
    if !(d > 0.0 && d <= 1.0) {
        return Err(Error::InvalidSpec(format!("link check needs d in (0, 1], got {d}")));
    }
    let trace = dixmier_trace_estimate(&model.eigen().power(d)?)?;
    let minkowski = minkowski_content_estimate(&model.gaps, d)?;
    let factor = 2f64.powf(d) * (1.0 - d);
    let rhs_value = factor * minkowski.value;
    let rhs_band = Interval::new(factor * minkowski.band.lo, factor * minkowski.band.hi);
    let lattice = model.source_ratios.as_deref().map(is_lattice);
    let overlap = trace.band.overlaps(&rhs_band);
    let asserted = lattice == Some(false) && minkowski.relative_band() < LINK_BAND;
    Ok(LinkCheck {
        d,
        trace,
        minkowski,
        rhs_value,
        rhs_band,
        lattice,
        overlap,
        asserted,
    })
}
