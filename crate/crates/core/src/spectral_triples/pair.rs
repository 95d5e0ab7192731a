use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::Arc;

use crate::asymptotics::EigenvalueSequence;
use crate::error::{Error, Result};
use crate::fractal_geometry::{distance, Affine, Generation, LimitIfs, Word};

use super::model::SpectralModel;

/// Default cap on enumerated eigen-entries.
pub const DEFAULT_ENTRY_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Enumeration {
    /// Eigen-entries (two per word).
    pub max_entries: usize,
    /// Longest word enumerated; `None` for no limit beyond the spec's own.
    pub max_depth: Option<usize>,
}

impl Default for Enumeration {
    fn default() -> Self {
        Enumeration {
            max_entries: DEFAULT_ENTRY_BUDGET,
            max_depth: None,
        }
    }
}

struct Pending {
    ratio: f64,
    order: u64,
    map: Affine,
    depth: usize,
    parent: u32,
    digit: u16,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ratio
            .total_cmp(&other.ratio)
            .then_with(|| other.order.cmp(&self.order))
    }
}

const ROOT: u32 = u32::MAX;

/// Pair-of-points triple: one 2×2 block per nonempty word `σ`, with
/// eigenvalue `1/d(w_σ x, w_σ y)` of `D`.
#[derive(Debug, Clone)]
pub struct PairTripleModel {
    ifs: LimitIfs,
    seed: (Vec<f64>, Vec<f64>),
    seed_distance: f64,
    /// `(parent word index, digit)` in enumeration order.
    records: Vec<(u32, u16)>,
    depths: Vec<u16>,
    ratios: Vec<f64>,
    /// `x_σ` then `y_σ` per word.
    tags: Vec<f64>,
    eigen: EigenvalueSequence,
    complete: bool,
    /// Smallest depth among words left unenumerated.
    frontier_depth: usize,
    /// Ratios per defining level, when the spec repeats (stationary or periodic).
    block: Option<Vec<Vec<f64>>>,
}

/// Fixed points of the first two maps of level 1.
pub fn default_seed(ifs: &LimitIfs) -> Result<(Vec<f64>, Vec<f64>)> {
    let level = ifs.level(1)?;
    if level.len() < 2 {
        return Err(Error::InvalidSpec("the default seed pair needs two maps at level 1".into()));
    }
    Ok((level[0].fixed_point(), level[1].fixed_point()))
}

pub fn pair_triple(ifs: &LimitIfs, seed: Option<(Vec<f64>, Vec<f64>)>, limits: Enumeration) -> Result<PairTripleModel> {
    let (x, y) = match seed {
        Some(s) => s,
        None => default_seed(ifs)?,
    };
    if x.len() != ifs.dim() || y.len() != ifs.dim() {
        return Err(Error::InvalidSpec(format!("seed points must have dimension {}", ifs.dim())));
    }
    let seed_distance = distance(&x, &y);
    if !(seed_distance > 0.0) {
        return Err(Error::SeedCoincident);
    }
    let spec_depth = ifs.depth_limit();
    let max_depth = match (limits.max_depth, spec_depth) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let words_wanted = limits.max_entries / 2;
    let dim = ifs.dim();

    let mut heap = BinaryHeap::new();
    let mut order = 0u64;
    let mut push_children = |heap: &mut BinaryHeap<Pending>, map: &Affine, ratio: f64, depth: usize, parent: u32| -> Result<()> {
        if max_depth.is_some_and(|m| depth >= m) {
            return Ok(());
        }
        for (j, m) in ifs.level(depth + 1)?.iter().enumerate() {
            heap.push(Pending {
                ratio: ratio * m.ratio(),
                order,
                map: map.then_inner(&m.to_affine()),
                depth: depth + 1,
                parent,
                digit: j as u16,
            });
            order += 1;
        }
        Ok(())
    };
    push_children(&mut heap, &Affine::identity(dim), 1.0, 0, ROOT)?;

    let mut records = Vec::new();
    let mut depths = Vec::new();
    let mut ratios = Vec::new();
    let mut tags = Vec::new();
    while records.len() < words_wanted {
        let Some(p) = heap.pop() else { break };
        let index = records.len() as u32;
        records.push((p.parent, p.digit));
        depths.push(p.depth as u16);
        ratios.push(p.ratio);
        tags.extend(p.map.apply(&x));
        tags.extend(p.map.apply(&y));
        push_children(&mut heap, &p.map, p.ratio, p.depth, index)?;
    }
    let complete = heap.is_empty();
    let frontier_depth = heap.iter().map(|p| p.depth).min().unwrap_or(usize::MAX);
    let values: Vec<f64> = ratios.iter().flat_map(|r| [r * seed_distance; 2]).collect();

    let block = match ifs.generation() {
        Generation::Stationary(m) => Some(vec![m.iter().map(|s| s.ratio()).collect()]),
        Generation::Periodic(b) => Some(b.iter().map(|l| l.iter().map(|s| s.ratio()).collect()).collect()),
        Generation::Explicit(_) => None,
    };
    let eigen = if complete {
        EigenvalueSequence::from_values(values)?
    } else {
        let seq = EigenvalueSequence::from_prefix(values)?;
        match (&block, limits.max_depth) {
            (Some(block), None) => {
                let frontier: Arc<[(f64, u16)]> = heap.iter().map(|p| (p.ratio, p.depth as u16)).collect();
                let block = block.clone();
                seq.with_tail(Arc::new(move |s: f64| {
                    let mut acc = 0.0;
                    for &(r, k) in frontier.iter() {
                        acc += r.powf(s) * subtree_factor(&block, k as usize, s)?;
                    }
                    Some(2.0 * seed_distance.powf(s) * acc)
                }))
            }
            _ => seq,
        }
    };
    Ok(PairTripleModel {
        ifs: ifs.clone(),
        seed: (x, y),
        seed_distance,
        records,
        depths,
        ratios,
        tags,
        eigen,
        complete,
        frontier_depth,
        block,
    })
}

fn level_sums(block: &[Vec<f64>], s: f64) -> Vec<f64> {
    block.iter().map(|l| l.iter().map(|r| r.powf(s)).sum()).collect()
}

/// `Σ_τ λ_τ^s` over all words `τ` (empty included) continuing from depth `k`.
fn subtree_factor(block: &[Vec<f64>], k: usize, s: f64) -> Option<f64> {
    let sums = level_sums(block, s);
    let b = sums.len();
    let period: f64 = sums.iter().product();
    if !(period < 1.0) {
        return None;
    }
    let mut acc = 0.0;
    let mut prod = 1.0;
    for m in 0..b {
        acc += prod;
        prod *= sums[(k + m) % b];
    }
    Some(acc / (1.0 - period))
}

impl PairTripleModel {
    pub fn ifs(&self) -> &LimitIfs {
        &self.ifs
    }

    pub fn seed(&self) -> (&[f64], &[f64]) {
        (&self.seed.0, &self.seed.1)
    }

    pub fn seed_distance(&self) -> f64 {
        self.seed_distance
    }

    /// Number of enumerated words.
    pub fn word_count(&self) -> usize {
        self.records.len()
    }

    /// Whether every word of the (finite) triple was enumerated.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// `i`-th enumerated word (0-based).
    pub fn word(&self, i: usize) -> Word {
        let mut digits = Vec::with_capacity(self.depths[i] as usize);
        let mut j = i as u32;
        while j != ROOT {
            let (parent, digit) = self.records[j as usize];
            digits.push(digit);
            j = parent;
        }
        digits.reverse();
        Word(digits)
    }

    /// Word behind eigen-entry `k` (1-based).
    pub fn entry_word(&self, k: usize) -> Word {
        self.word((k - 1) / 2)
    }

    pub fn word_ratio(&self, i: usize) -> f64 {
        self.ratios[i]
    }

    pub fn word_depth(&self, i: usize) -> usize {
        self.depths[i] as usize
    }

    /// Index of the level-1 word each enumerated word starts with.
    pub fn first_digit(&self, i: usize) -> u16 {
        let mut j = i as u32;
        loop {
            let (parent, digit) = self.records[j as usize];
            if parent == ROOT {
                return digit;
            }
            j = parent;
        }
    }

    /// Entry counts `n` at which exactly the words of length `≤ D` have been
    /// enumerated, for some `D`.
    pub fn level_boundaries(&self) -> Vec<usize> {
        let m = self.depths.len();
        let mut suffix_min = vec![self.frontier_depth; m + 1];
        for i in (0..m).rev() {
            suffix_min[i] = suffix_min[i + 1].min(self.depths[i] as usize);
        }
        let mut out = Vec::new();
        let mut prefix_max = 0;
        for i in 1..=m {
            prefix_max = prefix_max.max(self.depths[i - 1] as usize);
            if prefix_max < suffix_min[i] {
                out.push(2 * i);
            }
        }
        out
    }

    /// `ζ(s) = Tr |D|^{-s} = 2·d(x,y)^s·Σ_{|σ|≥1} λ_σ^s` for stationary or periodic specs.
    pub fn zeta_closed_form(&self, s: f64) -> Option<f64> {
        let block = self.block.as_ref()?;
        Some(2.0 * self.seed_distance.powf(s) * (subtree_factor(block, 0, s)? - 1.0))
    }

    /// Root of `Π_k Σ_j λ_{kj}^s = 1` over one period, for stationary or periodic specs.
    pub fn critical_exponent(&self) -> Option<f64> {
        let block = self.block.as_ref()?;
        let log_period = |s: f64| level_sums(block, s).iter().map(|x| x.ln()).sum::<f64>();
        let (mut lo, mut hi) = (0.0, 1.0);
        if log_period(lo) <= 0.0 {
            return Some(0.0);
        }
        while log_period(hi) > 0.0 {
            hi *= 2.0;
            if hi > 1e6 {
                return None;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if log_period(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }

    /// Ratios of the maps of a stationary spec.
    pub fn stationary_ratios(&self) -> Option<&[f64]> {
        match &self.block {
            Some(b) if b.len() == 1 && self.ifs.is_stationary() => Some(&b[0]),
            _ => None,
        }
    }
}

impl SpectralModel for PairTripleModel {
    fn eigen(&self) -> &EigenvalueSequence {
        &self.eigen
    }

    fn dim(&self) -> usize {
        self.ifs.dim()
    }

    fn tags(&self, k: usize) -> (&[f64], &[f64]) {
        let n = self.ifs.dim();
        let base = 2 * n * ((k - 1) / 2);
        (&self.tags[base..base + n], &self.tags[base + n..base + 2 * n])
    }

    fn reference_dimension(&self) -> Result<f64> {
        match self.critical_exponent() {
            Some(d) => Ok(d),
            None => Ok(super::model::spectral_dimension(self)?.value),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cantor() -> LimitIfs {
        LimitIfs::line(&[1.0 / 3.0, 1.0 / 3.0], &[0.0, 2.0 / 3.0]).unwrap()
    }

    #[test]
    fn cantor_depth_two() {
        let m = pair_triple(
            &cantor(),
            Some((vec![0.0], vec![1.0])),
            Enumeration {
                max_entries: 1000,
                max_depth: Some(2),
            },
        )
        .unwrap();
        assert!(m.is_complete());
        assert_eq!(m.word_count(), 6);
        let mu = m.eigen().to_vec();
        assert_eq!(mu.len(), 12);
        for (k, v) in mu.iter().enumerate() {
            let e = if k < 4 { 1.0 / 3.0 } else { 1.0 / 9.0 };
            assert!((v - e).abs() < 1e-15);
        }
        assert_eq!(m.word(2).to_string(), "1.1");
        let (x, y) = m.tags(5);
        assert!((x[0] - 0.0).abs() < 1e-15 && (y[0] - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn boundaries_of_uniform_ratios() {
        let m = pair_triple(
            &cantor(),
            None,
            Enumeration {
                max_entries: 2 * 20,
                max_depth: None,
            },
        )
        .unwrap();
        assert_eq!(m.level_boundaries(), vec![4, 12, 28]);
    }

    #[test]
    fn depth_zero_is_empty() {
        let m = pair_triple(
            &cantor(),
            None,
            Enumeration {
                max_entries: 10,
                max_depth: Some(0),
            },
        )
        .unwrap();
        assert_eq!(m.eigen().cap(), 0);
    }

    #[test]
    fn coincident_seed() {
        assert!(matches!(
            pair_triple(&cantor(), Some((vec![0.5], vec![0.5])), Enumeration::default()),
            Err(Error::SeedCoincident)
        ));
    }

    #[test]
    fn closed_tail_matches_closed_zeta() {
        let ifs = LimitIfs::line(&[0.5, 1.0 / 3.0], &[0.0, 2.0 / 3.0]).unwrap();
        let m = pair_triple(
            &ifs,
            None,
            Enumeration {
                max_entries: 20_000,
                max_depth: None,
            },
        )
        .unwrap();
        let s = 1.2;
        let head: f64 = m.eigen().iter().map(|v| v.powf(s)).sum();
        let tail = m.eigen().power(s).unwrap().closed_tail().unwrap();
        let z = m.zeta_closed_form(s).unwrap();
        assert!(((head + tail) / z - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_map_zeta() {
        let ifs = LimitIfs::line(&[0.5], &[0.0]).unwrap();
        let m = pair_triple(
            &ifs,
            Some((vec![0.0], vec![3.0])),
            Enumeration {
                max_entries: 100,
                max_depth: None,
            },
        )
        .unwrap();
        assert!((m.zeta_closed_form(1.0).unwrap() - 6.0).abs() < 1e-12);
    }
}
