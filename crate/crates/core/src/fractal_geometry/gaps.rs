use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::stats::Interval;

use super::ifs::LimitIfs;
use super::similarity::to_f64;

// Relative tolerance for endpoint comparisons in floating point.
const ENDPOINT_TOL: f64 = 1e-12;

/// Complementary interval `(lo, hi)` of `F` in its hull.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    pub lo: f64,
    pub hi: f64,
    /// Construction level that created the gap (1 = first level).
    pub level: usize,
}

impl Gap {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Gaps of `F ⊂ [a, b]` sorted by nonincreasing length.
#[derive(Debug, Clone, PartialEq)]
pub struct GapList {
    pub a: f64,
    pub b: f64,
    pub gaps: Vec<Gap>,
    /// Parts of `[a, b]` not resolved into listed gaps.
    pub residual: Vec<(f64, f64)>,
    /// Every gap longer than this is listed; zero when the list is complete.
    pub complete_above: f64,
}

impl GapList {
    /// Explicit gap list; `residual` holds the remaining pieces (e.g. the
    /// intervals of a finite union), and the list is taken as complete.
    pub fn new(a: f64, b: f64, gaps: Vec<(f64, f64)>, residual: Vec<(f64, f64)>) -> Result<Self> {
        if !(a < b) {
            return Err(Error::InvalidSpec(format!("need a < b, got [{a}, {b}]")));
        }
        let mut sorted = gaps.clone();
        sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
        for (i, g) in sorted.iter().enumerate() {
            if !(g.0 < g.1) || g.0 < a || g.1 > b {
                return Err(Error::InvalidSpec(format!("gap ({}, {}) is empty or outside [a, b]", g.0, g.1)));
            }
            if i > 0 && sorted[i - 1].1 > g.0 {
                return Err(Error::InvalidSpec(format!("gaps overlap near {}", g.0)));
            }
        }
        let mut list = GapList {
            a,
            b,
            gaps: gaps.into_iter().map(|(lo, hi)| Gap { lo, hi, level: 1 }).collect(),
            residual,
            complete_above: 0.0,
        };
        list.sort();
        Ok(list)
    }

    fn sort(&mut self) {
        self.gaps
            .sort_by(|x, y| y.len().total_cmp(&x.len()).then(x.lo.total_cmp(&y.lo)));
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.gaps.iter().map(Gap::len).collect()
    }

    pub fn gap_total(&self) -> f64 {
        self.gaps.iter().map(Gap::len).sum()
    }

    pub fn residual_total(&self) -> f64 {
        self.residual.iter().map(|r| r.1 - r.0).sum()
    }
}

/// Images of `[a, b]` under one level's maps: checked, sorted and described
/// by the relative positions of their gaps.
struct Pattern {
    /// Gaps as fractions `(u, v)` of `[a, b]`.
    gaps: Vec<(f64, f64)>,
    /// Child maps on the line as `(signed ratio, translation)`.
    maps: Vec<(f64, f64)>,
}

fn line_coeffs(ifs: &LimitIfs, level: usize) -> Result<Vec<(f64, f64)>> {
    Ok(ifs
        .level(level)?
        .iter()
        .map(|m| (m.ratio() * m.orthogonal()[(0, 0)], m.translation()[0]))
        .collect())
}

fn pattern(ifs: &LimitIfs, level: usize, a: f64, b: f64) -> Result<Pattern> {
    let maps = line_coeffs(ifs, level)?;
    let len = b - a;
    let tol = ENDPOINT_TOL * len;
    let mut images: Vec<(f64, f64)> = maps
        .iter()
        .map(|&(s, t)| {
            let (x, y) = (s * a + t, s * b + t);
            (x.min(y), x.max(y))
        })
        .collect();
    images.sort_by(|x, y| x.0.total_cmp(&y.0));
    let overlap = Error::OverlappingImages { level };
    if (images[0].0 - a).abs() > tol || (images[images.len() - 1].1 - b).abs() > tol {
        return Err(Error::InvalidSpec(format!(
            "level {level} images must span [{a}, {b}] (first starts at {}, last ends at {})",
            images[0].0,
            images[images.len() - 1].1
        )));
    }
    let mut gaps = Vec::new();
    for w in images.windows(2) {
        if w[1].0 < w[0].1 - tol {
            return Err(overlap);
        }
        if w[1].0 > w[0].1 + tol {
            gaps.push(((w[0].1 - a) / len, (w[1].0 - a) / len));
        }
    }
    Ok(Pattern { gaps, maps })
}

fn levels_for(ifs: &LimitIfs, depth: usize) -> usize {
    depth.min(ifs.depth_limit().unwrap_or(usize::MAX))
}

/// Largest relative pattern gap over the levels that define the spec.
fn max_relative_gap(ifs: &LimitIfs, a: f64, b: f64) -> Result<f64> {
    let count = ifs.defining_levels().len();
    let mut g: f64 = 0.0;
    for k in 1..=count {
        for (u, v) in pattern(ifs, k, a, b)?.gaps {
            g = g.max(v - u);
        }
    }
    Ok(g)
}

/// Convex hull of the attractor of a stationary or periodic IFS on the line.
pub fn attractor_hull(ifs: &LimitIfs) -> Result<(f64, f64)> {
    if ifs.dim() != 1 {
        return Err(Error::InvalidSpec("gap lists need an IFS on the line".into()));
    }
    if ifs.depth_limit().is_some() {
        return Err(Error::InvalidSpec("explicit specs need an explicit interval".into()));
    }
    let block = ifs.defining_levels().len();
    // compose one block of levels into a stationary family
    let mut maps: Vec<(f64, f64)> = vec![(1.0, 0.0)];
    for k in 1..=block {
        let level = line_coeffs(ifs, k)?;
        maps = maps
            .iter()
            .flat_map(|&(s, t)| level.iter().map(move |&(s2, t2)| (s * s2, s * t2 + t)))
            .collect();
    }
    let fixed: Vec<f64> = maps.iter().map(|&(s, t)| t / (1.0 - s)).collect();
    let mut lo = fixed.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = fixed.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..10_000 {
        let (mut nlo, mut nhi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(s, t) in &maps {
            let (x, y) = (s * lo + t, s * hi + t);
            nlo = nlo.min(x.min(y));
            nhi = nhi.max(x.max(y));
        }
        let done = (nlo - lo).abs() <= 1e-15 * (hi - lo).max(1e-300) && (nhi - hi).abs() <= 1e-15 * (hi - lo).max(1e-300);
        lo = lo.min(nlo);
        hi = hi.max(nhi);
        if done {
            break;
        }
    }
    Ok((lo, hi))
}

fn resolve_interval(ifs: &LimitIfs, interval: Option<(f64, f64)>) -> Result<(f64, f64)> {
    if ifs.dim() != 1 {
        return Err(Error::InvalidSpec("gap lists need an IFS on the line".into()));
    }
    let (a, b) = match interval {
        Some(i) => i,
        None => attractor_hull(ifs)?,
    };
    if !(a < b) {
        return Err(Error::InvalidSpec(format!("need a < b, got [{a}, {b}]")));
    }
    Ok((a, b))
}

/// All gaps created by the first `depth` construction levels of `[a, b]`
/// (the attractor hull when `interval` is `None`).
pub fn gaps_from_interval_ifs(ifs: &LimitIfs, depth: usize, interval: Option<(f64, f64)>, budget: u128) -> Result<GapList> {
    let (a, b) = resolve_interval(ifs, interval)?;
    let depth = levels_for(ifs, depth);
    let needed = ifs.word_count(depth)?;
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let len = b - a;
    let mut cylinders: Vec<(f64, f64)> = vec![(1.0, 0.0)];
    let mut gaps = Vec::new();
    for k in 1..=depth {
        let pat = pattern(ifs, k, a, b)?;
        let mut next = Vec::with_capacity(cylinders.len() * pat.maps.len());
        for &(s, t) in &cylinders {
            for &(u, v) in &pat.gaps {
                let (x, y) = (s * (a + u * len) + t, s * (a + v * len) + t);
                gaps.push(Gap { lo: x.min(y), hi: x.max(y), level: k });
            }
            for &(s2, t2) in &pat.maps {
                next.push((s * s2, s * t2 + t));
            }
        }
        cylinders = next;
    }
    let residual: Vec<(f64, f64)> = cylinders
        .iter()
        .map(|&(s, t)| {
            let (x, y) = (s * a + t, s * b + t);
            (x.min(y), x.max(y))
        })
        .collect();
    let max_res = residual.iter().map(|r| r.1 - r.0).fold(0.0, f64::max);
    let complete_above = if ifs.depth_limit().is_some_and(|l| depth >= l) {
        0.0
    } else {
        max_res * max_relative_gap(ifs, a, b)?
    };
    let mut list = GapList {
        a,
        b,
        gaps,
        residual,
        complete_above,
    };
    list.sort();
    Ok(list)
}

#[derive(Debug)]
enum Item {
    Gap(Gap),
    /// Unexpanded cylinder `x ↦ s·x + t` at `depth`.
    Cylinder { s: f64, t: f64, depth: usize },
}

#[derive(Debug)]
struct Entry {
    key: f64,
    order: u64,
    item: Item,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .total_cmp(&other.key)
            .then_with(|| other.order.cmp(&self.order))
    }
}

/// The `count` longest gaps of an unbounded (stationary or periodic) IFS on
/// the line, by best-first expansion of cylinders.
pub fn largest_gaps(ifs: &LimitIfs, count: usize, interval: Option<(f64, f64)>) -> Result<GapList> {
    if ifs.depth_limit().is_some() {
        return Err(Error::InvalidSpec("largest_gaps needs a stationary or periodic IFS".into()));
    }
    let (a, b) = resolve_interval(ifs, interval)?;
    let len = b - a;
    let block = ifs.defining_levels().len();
    let patterns: Vec<Pattern> = (1..=block).map(|k| pattern(ifs, k, a, b)).collect::<Result<_>>()?;
    let g_max = patterns
        .iter()
        .flat_map(|p| p.gaps.iter().map(|(u, v)| v - u))
        .fold(0.0, f64::max)
        * len;
    if g_max <= 0.0 {
        return Err(Error::InvalidSpec("the IFS leaves no gaps".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut order = 0u64;
    let mut push = |heap: &mut BinaryHeap<Entry>, key: f64, item: Item| {
        heap.push(Entry { key, order, item });
        order += 1;
    };
    push(&mut heap, g_max, Item::Cylinder { s: 1.0, t: 0.0, depth: 0 });
    let mut gaps = Vec::with_capacity(count);
    while gaps.len() < count {
        let Some(e) = heap.pop() else { break };
        match e.item {
            Item::Gap(g) => gaps.push(g),
            Item::Cylinder { s, t, depth, .. } => {
                let pat = &patterns[depth % block];
                for &(u, v) in &pat.gaps {
                    let (x, y) = (s * (a + u * len) + t, s * (a + v * len) + t);
                    let g = Gap { lo: x.min(y), hi: x.max(y), level: depth + 1 };
                    push(&mut heap, g.len(), Item::Gap(g));
                }
                for &(s2, t2) in &pat.maps {
                    let (cs, ct) = (s * s2, s * t2 + t);
                    let key = cs.abs() * g_max;
                    push(&mut heap, key, Item::Cylinder { s: cs, t: ct, depth: depth + 1 });
                }
            }
        }
    }
    let residual = heap
        .into_iter()
        .map(|e| match e.item {
            Item::Gap(g) => (g.lo, g.hi),
            Item::Cylinder { s, t, .. } => {
                let (x, y) = (s * a + t, s * b + t);
                (x.min(y), x.max(y))
            }
        })
        .collect();
    let complete_above = gaps.last().map(Gap::len).unwrap_or(g_max);
    let mut list = GapList {
        a,
        b,
        gaps,
        residual,
        complete_above,
    };
    list.sort();
    Ok(list)
}

/// Gap list in exact rational arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactGapList {
    pub a: BigRational,
    pub b: BigRational,
    pub gaps: Vec<(BigRational, BigRational)>,
    pub residual: Vec<(BigRational, BigRational)>,
}

impl ExactGapList {
    /// `Σ gaps + Σ residual = b − a`, exactly.
    pub fn conserved(&self) -> bool {
        let total: BigRational = self
            .gaps
            .iter()
            .chain(&self.residual)
            .fold(BigRational::zero(), |acc, (lo, hi)| acc + (hi - lo));
        total == &self.b - &self.a
    }

    /// Lengths sorted nonincreasing, as floats.
    pub fn lengths(&self) -> Vec<f64> {
        let mut v: Vec<BigRational> = self.gaps.iter().map(|(lo, hi)| hi - lo).collect();
        v.sort_by(|x, y| y.cmp(x));
        v.iter().map(to_f64).collect()
    }
}

/// Exact counterpart of [`gaps_from_interval_ifs`] for maps built with rational coefficients.
pub fn exact_gaps_from_interval_ifs(
    ifs: &LimitIfs,
    depth: usize,
    a: &BigRational,
    b: &BigRational,
    budget: u128,
) -> Result<ExactGapList> {
    if a >= b {
        return Err(Error::InvalidSpec("need a < b".into()));
    }
    let depth = levels_for(ifs, depth);
    let needed = ifs.word_count(depth)?;
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    // cylinders as x ↦ s·x + t with signed rational s
    let mut cylinders: Vec<(BigRational, BigRational)> = vec![(BigRational::from_integer(1.into()), BigRational::zero())];
    let mut gaps = Vec::new();
    let ordered = |x: BigRational, y: BigRational| if x <= y { (x, y) } else { (y, x) };
    for k in 1..=depth {
        let mut level: Vec<(BigRational, BigRational)> = Vec::new();
        for m in ifs.level(k)? {
            let e = m.exact().ok_or_else(|| {
                Error::InvalidSpec(format!("level {k} has a map without rational coefficients"))
            })?;
            let s = if e.reflect { -e.ratio.clone() } else { e.ratio.clone() };
            level.push((s, e.translation.clone()));
        }
        let mut images: Vec<(BigRational, BigRational)> =
            level.iter().map(|(s, t)| ordered(s * a + t, s * b + t)).collect();
        images.sort();
        if images[0].0 != *a || images[images.len() - 1].1 != *b {
            return Err(Error::InvalidSpec(format!("level {k} images must span [a, b]")));
        }
        let mut pattern_gaps = Vec::new();
        for w in images.windows(2) {
            match w[1].0.cmp(&w[0].1) {
                Ordering::Less => return Err(Error::OverlappingImages { level: k }),
                Ordering::Greater => pattern_gaps.push((w[0].1.clone(), w[1].0.clone())),
                Ordering::Equal => {}
            }
        }
        let mut next = Vec::with_capacity(cylinders.len() * level.len());
        for (s, t) in &cylinders {
            for (u, v) in &pattern_gaps {
                gaps.push(ordered(s * u + t, s * v + t));
            }
            for (s2, t2) in &level {
                next.push((s * s2, s * t2 + t));
            }
        }
        cylinders = next;
    }
    let residual = cylinders
        .iter()
        .map(|(s, t)| ordered(s * a + t, s * b + t))
        .collect();
    debug_assert!(gaps.iter().all(|(lo, hi): &(BigRational, BigRational)| (hi - lo).is_positive()));
    Ok(ExactGapList {
        a: a.clone(),
        b: b.clone(),
        gaps,
        residual,
    })
}

/// `vol S_ε(F) / ε^{1−d}` over a geometric ε-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MinkowskiEstimate {
    pub d: f64,
    /// Mean over the two smallest ε-decades.
    pub value: f64,
    /// `[min, max]` over the same window.
    pub band: Interval,
    pub eps: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Bands per ε-decade, smallest ε first.
    pub decade_bands: Vec<Interval>,
}

impl MinkowskiEstimate {
    pub fn relative_band(&self) -> f64 {
        self.band.width() / self.value
    }
}

pub const MINKOWSKI_EPS_RATIO: f64 = 0.9;

/// `vol S_ε = 2ε + Σ min(ℓ, 2ε) + (unresolved length)`, exact once `2ε`
/// exceeds every unlisted gap.
pub fn tube_volume(sorted_ascending: &[f64], prefix: &[f64], residual: f64, eps: f64) -> f64 {
    let two = 2.0 * eps;
    let k = sorted_ascending.partition_point(|&l| l <= two);
    2.0 * eps + prefix[k] + two * (sorted_ascending.len() - k) as f64 + residual
}

pub fn minkowski_content_estimate(gaps: &GapList, d: f64) -> Result<MinkowskiEstimate> {
    if !(d > 0.0 && d <= 1.0) {
        return Err(Error::InvalidSpec(format!("Minkowski exponent must lie in (0, 1], got {d}")));
    }
    let mut lens = gaps.lengths();
    if lens.is_empty() {
        return Err(Error::InvalidSpec("gap list is empty".into()));
    }
    lens.sort_by(f64::total_cmp);
    let mut prefix = vec![0.0];
    for l in &lens {
        prefix.push(prefix.last().unwrap() + l);
    }
    let residual = gaps.residual_total();
    let l_min = lens[0];
    let eps_max = (gaps.b - gaps.a) / 2.0;
    let eps_min = if gaps.complete_above > 0.0 { 10.0 * l_min } else { 1e-4 * l_min };
    if 2.0 * eps_min < gaps.complete_above {
        let vol = tube_volume(&lens, &prefix, residual, eps_min);
        let relative = residual / vol;
        if relative > 0.01 {
            return Err(Error::TruncationTooCoarse { relative });
        }
    }
    let mut eps = Vec::new();
    let mut e = eps_max;
    while e >= eps_min {
        eps.push(e);
        e *= MINKOWSKI_EPS_RATIO;
    }
    if eps.len() < 2 {
        return Err(Error::TruncationTooCoarse { relative: 1.0 });
    }
    eps.reverse();
    let ratios: Vec<f64> = eps
        .iter()
        .map(|&e| tube_volume(&lens, &prefix, residual, e) / e.powf(1.0 - d))
        .collect();
    let window_end = eps.partition_point(|&e| e <= 100.0 * eps[0]).max(2);
    let w = &ratios[..window_end];
    let band = Interval::from_values(w.iter().copied()).unwrap();
    let value = w.iter().sum::<f64>() / w.len() as f64;
    let mut decade_bands = Vec::new();
    let mut start = 0;
    while start < eps.len() {
        let end = eps.partition_point(|&e| e < 10.0 * eps[start]).max(start + 1);
        decade_bands.push(Interval::from_values(ratios[start..end].iter().copied()).unwrap());
        start = end;
    }
    Ok(MinkowskiEstimate {
        d,
        value,
        band,
        eps,
        ratios,
        decade_bands,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractal_geometry::Similarity;

    fn cantor() -> LimitIfs {
        LimitIfs::line(&[1.0 / 3.0, 1.0 / 3.0], &[0.0, 2.0 / 3.0]).unwrap()
    }

    #[test]
    fn cantor_levels() {
        let g = gaps_from_interval_ifs(&cantor(), 1, None, 100).unwrap();
        assert_eq!(g.gaps.len(), 1);
        assert!((g.gaps[0].lo - 1.0 / 3.0).abs() < 1e-15 && (g.gaps[0].hi - 2.0 / 3.0).abs() < 1e-15);
        let g = gaps_from_interval_ifs(&cantor(), 3, None, 100).unwrap();
        let lens = g.lengths();
        assert_eq!(lens.len(), 7);
        let expect = [1.0 / 3.0, 1.0 / 9.0, 1.0 / 9.0, 1.0 / 27.0, 1.0 / 27.0, 1.0 / 27.0, 1.0 / 27.0];
        for (l, e) in lens.iter().zip(expect) {
            assert!((l - e).abs() < 1e-15);
        }
        assert!((g.gap_total() + g.residual_total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_lattice_depth_two() {
        let ifs = LimitIfs::line(&[0.5, 1.0 / 3.0], &[0.0, 2.0 / 3.0]).unwrap();
        let g = gaps_from_interval_ifs(&ifs, 2, Some((0.0, 1.0)), 100).unwrap();
        let lens = g.lengths();
        let expect = [1.0 / 6.0, 1.0 / 12.0, 1.0 / 18.0];
        assert_eq!(lens.len(), 3);
        for (l, e) in lens.iter().zip(expect) {
            assert!((l - e).abs() < 1e-15);
        }
    }

    #[test]
    fn overlapping_images_rejected() {
        let ifs = LimitIfs::line(&[0.6, 0.6], &[0.0, 0.4]).unwrap();
        assert!(matches!(
            gaps_from_interval_ifs(&ifs, 2, Some((0.0, 1.0)), 100),
            Err(Error::OverlappingImages { level: 1 })
        ));
    }

    #[test]
    fn exact_conservation() {
        let maps = vec![
            Similarity::line_rational("1/2", false, "0").unwrap(),
            Similarity::line_rational("1/3", false, "2/3").unwrap(),
        ];
        let ifs = LimitIfs::stationary(maps).unwrap();
        let zero = BigRational::zero();
        let one = BigRational::from_integer(1.into());
        let g = exact_gaps_from_interval_ifs(&ifs, 8, &zero, &one, 1 << 20).unwrap();
        assert!(g.conserved());
        assert_eq!(g.gaps.len(), 255);
        let f = gaps_from_interval_ifs(&ifs, 8, Some((0.0, 1.0)), 1 << 20).unwrap();
        for (x, y) in g.lengths().iter().zip(f.lengths()) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn best_first_matches_depth_order() {
        let g = largest_gaps(&cantor(), 2usize.pow(10) - 1, None).unwrap();
        let h = gaps_from_interval_ifs(&cantor(), 10, None, 1 << 12).unwrap();
        assert_eq!(g.lengths().len(), h.lengths().len());
        for (x, y) in g.lengths().iter().zip(h.lengths()) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!((g.gap_total() + g.residual_total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hull_of_reflected_ifs() {
        let maps = vec![Similarity::line_reflected(0.25, 0.25).unwrap(), Similarity::line(0.25, 0.75).unwrap()];
        let (a, b) = attractor_hull(&LimitIfs::stationary(maps).unwrap()).unwrap();
        assert!((a - 0.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12, "{a} {b}");
    }

    #[test]
    fn finite_union_content() {
        // [0,1] ∪ [2,3] ∪ [3.5,4]: total length 2.5
        let g = GapList::new(0.0, 4.0, vec![(1.0, 2.0), (3.0, 3.5)], vec![(0.0, 1.0), (2.0, 3.0), (3.5, 4.0)]).unwrap();
        let m = minkowski_content_estimate(&g, 1.0).unwrap();
        assert!((m.value - 2.5).abs() < 0.05, "{m:?}");
    }
}
