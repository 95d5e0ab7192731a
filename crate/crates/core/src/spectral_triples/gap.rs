use crate::asymptotics::EigenvalueSequence;
use crate::error::{Error, Result};
use crate::fractal_geometry::{largest_gaps, similarity_dimension_of, Generation, GapList, LimitIfs};

use super::model::{log_ratio_estimate, SpectralModel};

/// Connes' triple on a totally disconnected `F ⊂ ℝ`: one 2×2 block per gap
/// `(a_n, b_n)`, so every gap length is an eigenvalue of `D^{-1}` twice.
#[derive(Debug, Clone)]
pub struct GapTripleModel {
    pub gaps: GapList,
    eigen: EigenvalueSequence,
    /// `(a_n, b_n)` per gap in eigenvalue order.
    tags: Vec<f64>,
    /// Ratios of the stationary IFS the gaps came from, if known.
    pub source_ratios: Option<Vec<f64>>,
}

/// Eigen-entries from a gap list. For truncated lists only gaps above the
/// completeness threshold are used, so the entries are a true prefix.
pub fn gap_triple(gaps: GapList) -> Result<GapTripleModel> {
    let complete = gaps.complete_above == 0.0;
    let used: Vec<(f64, f64)> = gaps
        .gaps
        .iter()
        .filter(|g| complete || g.len() >= gaps.complete_above)
        .map(|g| (g.lo, g.hi))
        .collect();
    if used.is_empty() {
        return Err(Error::InvalidSpec("gap list has no complete prefix".into()));
    }
    let mut values = Vec::with_capacity(2 * used.len());
    let mut tags = Vec::with_capacity(2 * used.len());
    for &(lo, hi) in &used {
        values.extend([hi - lo, hi - lo]);
        tags.extend([lo, hi]);
    }
    let eigen = if complete {
        EigenvalueSequence::from_values(values)?
    } else {
        EigenvalueSequence::from_prefix(values)?
    };
    Ok(GapTripleModel {
        gaps,
        eigen,
        tags,
        source_ratios: None,
    })
}

/// Gap triple of a stationary IFS on the line with `entries` eigen-entries.
pub fn gap_triple_of_ifs(ifs: &LimitIfs, entries: usize, interval: Option<(f64, f64)>) -> Result<GapTripleModel> {
    let gaps = largest_gaps(ifs, entries.div_ceil(2), interval)?;
    let mut model = gap_triple(gaps)?;
    if let Generation::Stationary(maps) = ifs.generation() {
        model.source_ratios = Some(maps.iter().map(|m| m.ratio()).collect());
    }
    Ok(model)
}

impl GapTripleModel {
    pub fn gap_count(&self) -> usize {
        self.tags.len() / 2
    }
}

impl SpectralModel for GapTripleModel {
    fn eigen(&self) -> &EigenvalueSequence {
        &self.eigen
    }

    fn dim(&self) -> usize {
        1
    }

    fn tags(&self, k: usize) -> (&[f64], &[f64]) {
        let g = (k - 1) / 2;
        (&self.tags[2 * g..2 * g + 1], &self.tags[2 * g + 1..2 * g + 2])
    }

    fn reference_dimension(&self) -> Result<f64> {
        match &self.source_ratios {
            Some(r) => Ok(similarity_dimension_of(r)),
            None => Ok(super::model::spectral_dimension(self)?.value),
        }
    }

    fn log_ratio_dimension(&self) -> Option<f64> {
        log_ratio_estimate(&self.eigen)
    }
}
