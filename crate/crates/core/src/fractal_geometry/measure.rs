use crate::error::{Error, Result};

use super::ifs::{LimitIfs, Word};

/// Cylinder weights `Π_k λ_{kσ(k)}^s / Σ_j λ_{kj}^s` of the limit measure `μ_s` at one depth.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderMeasure {
    pub s: f64,
    pub depth: usize,
    /// Lexicographic `(σ, weight)`.
    pub weights: Vec<(Word, f64)>,
}

impl CylinderMeasure {
    pub fn weight(&self, word: &Word) -> Option<f64> {
        self.weights
            .binary_search_by(|(w, _)| w.cmp(word))
            .ok()
            .map(|i| self.weights[i].1)
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().map(|w| w.1).sum()
    }

    /// Mass of all depth cylinders below `prefix`.
    pub fn mass_of_prefix(&self, prefix: &Word) -> f64 {
        self.weights
            .iter()
            .filter(|(w, _)| w.starts_with(prefix))
            .map(|w| w.1)
            .sum()
    }
}

/// Per-level probability vectors `λ_{kj}^s / Σ_i λ_{ki}^s`.
pub fn level_probabilities(ifs: &LimitIfs, s: f64, level: usize) -> Result<Vec<f64>> {
    let pow: Vec<f64> = ifs.level_ratios(level)?.iter().map(|r| r.powf(s)).collect();
    let z: f64 = pow.iter().sum();
    Ok(pow.iter().map(|p| p / z).collect())
}

pub fn cylinder_measure(ifs: &LimitIfs, s: f64, depth: usize, budget: u128) -> Result<CylinderMeasure> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidSpec(format!("measure exponent must be positive, got {s}")));
    }
    let probs: Vec<Vec<f64>> = (1..=depth).map(|k| level_probabilities(ifs, s, k)).collect::<Result<_>>()?;
    let weights = ifs
        .words(depth, budget)?
        .into_iter()
        .map(|w| {
            let p = w.0.iter().enumerate().map(|(k, &d)| probs[k][d as usize]).product();
            (w, p)
        })
        .collect();
    Ok(CylinderMeasure { s, depth, weights })
}
