use std::fmt;

use crate::error::{Error, Result};

use super::similarity::{Affine, Similarity};

/// How the level families `{w_{nj}}` are produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Generation {
    /// The same family at every level (self-similar set).
    Stationary(Vec<Similarity>),
    /// The block of levels repeats forever.
    Periodic(Vec<Vec<Similarity>>),
    /// Finitely many levels; deeper levels are unavailable.
    Explicit(Vec<Vec<Similarity>>),
}

/// Level-indexed family of contracting similarities.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitIfs {
    generation: Generation,
    dim: usize,
    /// Axis-aligned open box `V` asserted to satisfy the open set condition.
    pub osc_box: Option<(Vec<f64>, Vec<f64>)>,
}

impl LimitIfs {
    pub fn new(generation: Generation) -> Result<Self> {
        let levels: Vec<&Vec<Similarity>> = match &generation {
            Generation::Stationary(maps) => vec![maps],
            Generation::Periodic(block) | Generation::Explicit(block) => block.iter().collect(),
        };
        if levels.is_empty() {
            return Err(Error::InvalidSpec("no levels given".into()));
        }
        let dim = match levels[0].first() {
            Some(m) => m.dim(),
            None => return Err(Error::InvalidSpec("level 1 has no maps".into())),
        };
        for (i, level) in levels.iter().enumerate() {
            if level.is_empty() {
                return Err(Error::InvalidSpec(format!("level {} has no maps", i + 1)));
            }
            if level.len() > u16::MAX as usize {
                return Err(Error::InvalidSpec(format!("level {} has too many maps", i + 1)));
            }
            if let Some(m) = level.iter().find(|m| m.dim() != dim) {
                return Err(Error::InvalidSpec(format!(
                    "level {} mixes dimensions {} and {dim}",
                    i + 1,
                    m.dim()
                )));
            }
        }
        Ok(LimitIfs {
            generation,
            dim,
            osc_box: None,
        })
    }

    pub fn stationary(maps: Vec<Similarity>) -> Result<Self> {
        Self::new(Generation::Stationary(maps))
    }

    /// Stationary IFS on the line from ratios and translations.
    pub fn line(ratios: &[f64], translations: &[f64]) -> Result<Self> {
        if ratios.len() != translations.len() {
            return Err(Error::InvalidSpec("ratios and translations differ in length".into()));
        }
        let maps = ratios
            .iter()
            .zip(translations)
            .map(|(&r, &t)| Similarity::line(r, t))
            .collect::<Result<Vec<_>>>()?;
        Self::stationary(maps)
    }

    pub fn with_osc_box(mut self, lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != self.dim || hi.len() != self.dim || lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(Error::InvalidSpec("open set box must be a nonempty box of the ambient dimension".into()));
        }
        self.osc_box = Some((lo, hi));
        Ok(self)
    }

    pub fn generation(&self) -> &Generation {
        &self.generation
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_stationary(&self) -> bool {
        matches!(self.generation, Generation::Stationary(_))
    }

    /// Number of levels available, `None` when unbounded.
    pub fn depth_limit(&self) -> Option<usize> {
        match &self.generation {
            Generation::Explicit(levels) => Some(levels.len()),
            _ => None,
        }
    }

    /// Maps of level `n ≥ 1`.
    pub fn level(&self, n: usize) -> Result<&[Similarity]> {
        if n == 0 {
            return Err(Error::InvalidSpec("levels are numbered from 1".into()));
        }
        match &self.generation {
            Generation::Stationary(maps) => Ok(maps),
            Generation::Periodic(block) => Ok(&block[(n - 1) % block.len()]),
            Generation::Explicit(levels) => levels.get(n - 1).map(|v| v.as_slice()).ok_or_else(|| {
                Error::InvalidSpec(format!("explicit spec has {} levels, level {n} requested", levels.len()))
            }),
        }
    }

    pub fn level_ratios(&self, n: usize) -> Result<Vec<f64>> {
        Ok(self.level(n)?.iter().map(|m| m.ratio()).collect())
    }

    /// The levels that define the spec (one for stationary, the block for periodic).
    pub fn defining_levels(&self) -> Vec<&[Similarity]> {
        match &self.generation {
            Generation::Stationary(maps) => vec![maps.as_slice()],
            Generation::Periodic(b) | Generation::Explicit(b) => b.iter().map(|v| v.as_slice()).collect(),
        }
    }

    /// Equal ratios within every level.
    pub fn translation_flag(&self) -> bool {
        self.defining_levels().iter().all(|level| {
            let r0 = level[0].ratio();
            level.iter().all(|m| (m.ratio() - r0).abs() <= 1e-15 * r0)
        })
    }

    /// `Π_k p_k` over levels `1..=depth`, saturating.
    pub fn word_count(&self, depth: usize) -> Result<u128> {
        let mut total: u128 = 1;
        for n in 1..=depth {
            total = total.saturating_mul(self.level(n)?.len() as u128);
        }
        Ok(total)
    }

    pub fn word_map(&self, word: &Word) -> Result<Affine> {
        let mut acc = Affine::identity(self.dim);
        for (k, &d) in word.0.iter().enumerate() {
            acc = acc.then_inner(&self.level(k + 1)?[d as usize].to_affine());
        }
        Ok(acc)
    }

    pub fn word_ratio(&self, word: &Word) -> Result<f64> {
        let mut r = 1.0;
        for (k, &d) in word.0.iter().enumerate() {
            r *= self.level(k + 1)?[d as usize].ratio();
        }
        Ok(r)
    }

    /// All words of length `depth` in lexicographic order.
    pub fn words(&self, depth: usize, budget: u128) -> Result<Vec<Word>> {
        let needed = self.word_count(depth)?;
        if needed > budget {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        let radices: Vec<usize> = (1..=depth).map(|n| self.level(n).map(|l| l.len())).collect::<Result<_>>()?;
        let mut out = Vec::with_capacity(needed as usize);
        let mut digits = vec![0u16; depth];
        loop {
            out.push(Word(digits.clone()));
            let mut k = depth;
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                digits[k] += 1;
                if (digits[k] as usize) < radices[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
    }

    /// Same spec with the ambient space scaled by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let scale = |v: &Vec<Similarity>| v.iter().map(|m| m.conjugate_scale(c)).collect::<Vec<_>>();
        let generation = match &self.generation {
            Generation::Stationary(m) => Generation::Stationary(scale(m)),
            Generation::Periodic(b) => Generation::Periodic(b.iter().map(scale).collect()),
            Generation::Explicit(b) => Generation::Explicit(b.iter().map(scale).collect()),
        };
        LimitIfs {
            generation,
            dim: self.dim,
            osc_box: self
                .osc_box
                .as_ref()
                .map(|(lo, hi)| (lo.iter().map(|x| x * c).collect(), hi.iter().map(|x| x * c).collect())),
        }
    }
}

/// Finite string `σ` with `σ(k)` indexing the maps of level `k` (stored 0-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<u16>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn starts_with(&self, prefix: &Word) -> bool {
        self.0.starts_with(&prefix.0)
    }

    pub fn child(&self, digit: u16) -> Word {
        let mut d = self.0.clone();
        d.push(digit);
        Word(d)
    }
}

impl fmt::Display for Word {
    /// 1-based digits joined by dots; the empty word prints as `-`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "-");
        }
        let parts: Vec<String> = self.0.iter().map(|d| (d + 1).to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// Root `s` of `Σ_j λ_j^s = 1`, by bisection.
pub fn similarity_dimension(ifs: &LimitIfs) -> Result<f64> {
    match ifs.generation() {
        Generation::Stationary(maps) => {
            let ratios: Vec<f64> = maps.iter().map(|m| m.ratio()).collect();
            Ok(similarity_dimension_of(&ratios))
        }
        _ => Err(Error::InvalidSpec("similarity dimension needs a stationary IFS".into())),
    }
}

pub fn similarity_dimension_of(ratios: &[f64]) -> f64 {
    if ratios.len() < 2 {
        return 0.0;
    }
    let g = |s: f64| ratios.iter().map(|r| r.powf(s)).sum::<f64>() - 1.0;
    let mut lo = 0.0;
    let mut hi = 1.0;
    while g(hi) > 0.0 {
        hi *= 2.0;
    }
    while hi - lo > 1e-13 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All `log λ_j` are integer multiples of a common real, up to `1e-9`.
pub fn is_lattice(ratios: &[f64]) -> bool {
    let logs: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let base = logs[0];
    logs.iter().all(|l| {
        let x = l / base;
        best_rational(x, 1000).map_or(false, |(p, q)| (x - p as f64 / q as f64).abs() < 1e-9)
    })
}

/// Closest continued-fraction convergent with denominator at most `max_den`.
fn best_rational(x: f64, max_den: i64) -> Option<(i64, i64)> {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut y = x;
    let mut best = None;
    for _ in 0..64 {
        let a = y.floor();
        if a.abs() > 1e12 {
            break;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        best = Some((h2, k2));
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = y - a as f64;
        if frac.abs() < 1e-15 {
            break;
        }
        y = 1.0 / frac;
    }
    best
}

/// Partial dimension ratios `R_n = Σ₁ⁿ log p_k / Σ₁ⁿ log(1/λ_k)` of a translation fractal.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationDimension {
    /// `limsup R_n`: the closed form for periodic specs, else the max over the late half.
    pub value: f64,
    /// `liminf R_n`, estimated the same way.
    pub liminf: f64,
    pub partial_ratios: Vec<f64>,
    pub closed_form: Option<f64>,
}

pub fn translation_dimension_formula(ifs: &LimitIfs, depth: usize) -> Result<TranslationDimension> {
    if !ifs.translation_flag() {
        return Err(Error::InvalidSpec("translation formula needs equal ratios within each level".into()));
    }
    if depth == 0 {
        return Err(Error::InvalidSpec("depth must be positive".into()));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    let mut partial_ratios = Vec::with_capacity(depth);
    for n in 1..=depth {
        let level = ifs.level(n)?;
        num += (level.len() as f64).ln();
        den += (1.0 / level[0].ratio()).ln();
        partial_ratios.push(num / den);
    }
    let closed_form = match ifs.generation() {
        Generation::Stationary(_) | Generation::Periodic(_) => {
            let levels = ifs.defining_levels();
            let n: f64 = levels.iter().map(|l| (l.len() as f64).ln()).sum();
            let d: f64 = levels.iter().map(|l| (1.0 / l[0].ratio()).ln()).sum();
            Some(n / d)
        }
        Generation::Explicit(_) => None,
    };
    let tail = &partial_ratios[depth / 2..];
    let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(TranslationDimension {
        value: closed_form.unwrap_or(hi),
        liminf: closed_form.unwrap_or(lo),
        partial_ratios,
        closed_form,
    })
}

/// Finite-depth evidence for the asserted open set condition.
#[derive(Debug, Clone, PartialEq)]
pub struct OscEvidence {
    pub asserted: bool,
    pub depth: usize,
    /// Images `w_{nj}(V)` leaving `V`.
    pub escaping: usize,
    /// Pairs of same-level images whose bounding boxes overlap with positive volume.
    pub overlapping_pairs: usize,
}

pub fn osc_evidence(ifs: &LimitIfs, depth: usize) -> Result<OscEvidence> {
    let Some((lo, hi)) = &ifs.osc_box else {
        return Ok(OscEvidence {
            asserted: false,
            depth: 0,
            escaping: 0,
            overlapping_pairs: 0,
        });
    };
    let n = ifs.dim();
    let corners: Vec<Vec<f64>> = (0..1usize << n)
        .map(|mask| (0..n).map(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] }).collect())
        .collect();
    let bbox = |m: &Similarity| {
        let pts: Vec<Vec<f64>> = corners.iter().map(|c| m.apply(c)).collect();
        let l: Vec<f64> = (0..n).map(|i| pts.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min)).collect();
        let h: Vec<f64> = (0..n).map(|i| pts.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max)).collect();
        (l, h)
    };
    let tol = 1e-12;
    let mut escaping = 0;
    let mut overlapping_pairs = 0;
    let levels = depth.min(ifs.depth_limit().unwrap_or(depth)).max(1);
    for k in 1..=levels {
        let boxes: Vec<_> = ifs.level(k)?.iter().map(bbox).collect();
        for (l, h) in &boxes {
            if (0..n).any(|i| l[i] < lo[i] - tol || h[i] > hi[i] + tol) {
                escaping += 1;
            }
        }
        for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                let (a, b) = (&boxes[i], &boxes[j]);
                if (0..n).all(|d| a.0[d].max(b.0[d]) < a.1[d].min(b.1[d]) - tol) {
                    overlapping_pairs += 1;
                }
            }
        }
    }
    Ok(OscEvidence {
        asserted: true,
        depth: levels,
        escaping,
        overlapping_pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cantor() -> LimitIfs {
        LimitIfs::line(&[1.0 / 3.0, 1.0 / 3.0], &[0.0, 2.0 / 3.0]).unwrap()
    }

    #[test]
    fn dimensions() {
        let d = similarity_dimension(&cantor()).unwrap();
        assert!((d - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
        assert!((similarity_dimension_of(&[0.5, 0.5]) - 1.0).abs() < 1e-12);
        assert_eq!(similarity_dimension_of(&[0.5]), 0.0);
    }

    #[test]
    fn lattice_detection() {
        assert!(is_lattice(&[1.0 / 3.0, 1.0 / 3.0]));
        assert!(is_lattice(&[0.5, 0.25, 0.125]));
        assert!(!is_lattice(&[0.5, 1.0 / 3.0]));
    }

    #[test]
    fn words_lexicographic() {
        let w = cantor().words(2, 100).unwrap();
        let s: Vec<String> = w.iter().map(|w| w.to_string()).collect();
        assert_eq!(s, ["1.1", "1.2", "2.1", "2.2"]);
        assert!(matches!(cantor().words(10, 100), Err(Error::BudgetExceeded { needed: 1024, .. })));
    }

    #[test]
    fn osc_on_cantor() {
        let ifs = cantor().with_osc_box(vec![0.0], vec![1.0]).unwrap();
        let e = osc_evidence(&ifs, 3).unwrap();
        assert_eq!((e.escaping, e.overlapping_pairs), (0, 0));
        let bad = LimitIfs::line(&[0.6, 0.6], &[0.0, 0.4]).unwrap().with_osc_box(vec![0.0], vec![1.0]).unwrap();
        assert_eq!(osc_evidence(&bad, 1).unwrap().overlapping_pairs, 1);
    }

    #[test]
    fn explicit_depth_limit() {
        let lv = vec![Similarity::line(0.5, 0.0).unwrap(), Similarity::line(0.5, 0.5).unwrap()];
        let ifs = LimitIfs::new(Generation::Explicit(vec![lv.clone(), lv])).unwrap();
        assert!(ifs.level(3).is_err());
        assert_eq!(ifs.word_count(2).unwrap(), 4);
    }
}
