use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::stats::{geomspace, linear_fit};

use super::ifs::{LimitIfs, Word};
use super::similarity::{distance, Affine};

pub type Point = Vec<f64>;

/// Default cap on enumerated words.
pub const DEFAULT_WORD_BUDGET: u128 = 10_000_000;

// Above this many points per cloud, Hausdorff distances use grid hashing.
const BRUTE_FORCE_LIMIT: usize = 10_000;

/// `(σ, w_σ(seed))` for every word of length `depth`, lexicographically.
pub fn attractor_cloud(
    ifs: &LimitIfs,
    depth: usize,
    seed: &[f64],
    budget: u128,
) -> Result<Vec<(Word, Point)>> {
    check_seed(ifs, seed)?;
    let needed = ifs.word_count(depth)?;
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut out = Vec::with_capacity(needed as usize);
    let mut prefix = Vec::with_capacity(depth);
    walk(ifs, depth, &Affine::identity(ifs.dim()), &mut prefix, &mut |w, map| {
        out.push((Word(w.to_vec()), map.apply(seed)));
    })?;
    Ok(out)
}

/// Depth-first lexicographic traversal handing each leaf its composed map.
pub(crate) fn walk<F: FnMut(&[u16], &Affine)>(
    ifs: &LimitIfs,
    depth: usize,
    map: &Affine,
    prefix: &mut Vec<u16>,
    leaf: &mut F,
) -> Result<()> {
    if prefix.len() == depth {
        leaf(prefix, map);
        return Ok(());
    }
    let level = ifs.level(prefix.len() + 1)?;
    for (j, m) in level.iter().enumerate() {
        let next = map.then_inner(&m.to_affine());
        prefix.push(j as u16);
        walk(ifs, depth, &next, prefix, leaf)?;
        prefix.pop();
    }
    Ok(())
}

fn check_seed(ifs: &LimitIfs, seed: &[f64]) -> Result<()> {
    if seed.len() != ifs.dim() {
        return Err(Error::InvalidSpec(format!(
            "seed has dimension {} but the IFS acts on R^{}",
            seed.len(),
            ifs.dim()
        )));
    }
    Ok(())
}

/// Iterates `S_n(K) = W_1∘⋯∘W_n(K)` with Cauchy diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionResult {
    pub cloud: Vec<Point>,
    /// `ρ(S_{n+1}K, S_nK)` for `n = 0 … depth−1`.
    pub distances: Vec<f64>,
    /// `M·Π_{k≤n} max_j λ_{kj}` for the same `n`.
    pub bounds: Vec<f64>,
    /// `M = max_k ρ(W_k K, K)`.
    pub m: f64,
}

impl ContractionResult {
    pub fn bound_holds(&self, rel_tol: f64) -> bool {
        self.distances
            .iter()
            .zip(&self.bounds)
            .all(|(d, b)| *d <= b * (1.0 + rel_tol) + 1e-15)
    }
}

pub fn contraction_limit(
    ifs: &LimitIfs,
    seed: &[Point],
    depth: usize,
    budget: u128,
) -> Result<ContractionResult> {
    if seed.is_empty() {
        return Err(Error::InvalidSpec("seed cloud is empty".into()));
    }
    for p in seed {
        check_seed(ifs, p)?;
    }
    let needed = ifs.word_count(depth)?.saturating_mul(seed.len() as u128);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    // products P_n of the largest ratios, n = 0 … depth
    let mut products = vec![1.0];
    for n in 1..=depth {
        let r = ifs.level_ratios(n)?.into_iter().fold(0.0, f64::max);
        products.push(products[n - 1] * r);
    }
    if divergent(&products) {
        return Err(Error::DivergentSpec);
    }
    let mut m: f64 = 0.0;
    let levels = depth.max(1).min(ifs.depth_limit().unwrap_or(usize::MAX));
    for k in 1..=levels {
        let image: Vec<Point> = ifs
            .level(k)?
            .iter()
            .flat_map(|w| seed.iter().map(move |p| w.apply(p)))
            .collect();
        m = m.max(hausdorff_distance(&image, seed));
    }
    let mut clouds = vec![seed.to_vec()];
    for n in 1..=depth {
        let mut next = Vec::new();
        let mut prefix = Vec::new();
        walk(ifs, n, &Affine::identity(ifs.dim()), &mut prefix, &mut |_, map| {
            next.extend(seed.iter().map(|p| map.apply(p)));
        })?;
        clouds.push(next);
    }
    let distances = (0..depth)
        .map(|n| hausdorff_distance(&clouds[n + 1], &clouds[n]))
        .collect();
    let bounds = (0..depth).map(|n| m * products[n]).collect();
    Ok(ContractionResult {
        cloud: clouds.pop().unwrap(),
        distances,
        bounds,
        m,
    })
}

/// `Σ_n P_n` looks divergent: the late geometric rate of `P_n` is not below 1.
fn divergent(products: &[f64]) -> bool {
    let n = products.len() - 1;
    if n < 2 {
        return false;
    }
    let h = n / 2;
    let rate = (products[n] / products[h]).powf(1.0 / (n - h) as f64);
    !(rate < 1.0 - 1e-12)
}

/// Symmetric Hausdorff distance between finite clouds.
pub fn hausdorff_distance(a: &[Point], b: &[Point]) -> f64 {
    directed(a, b).max(directed(b, a))
}

fn directed(a: &[Point], b: &[Point]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    if a[0].len() == 1 {
        let mut bs: Vec<f64> = b.iter().map(|p| p[0]).collect();
        bs.sort_by(f64::total_cmp);
        return a
            .iter()
            .map(|p| {
                let x = p[0];
                let i = bs.partition_point(|&y| y < x);
                let mut d = f64::INFINITY;
                if i < bs.len() {
                    d = d.min(bs[i] - x);
                }
                if i > 0 {
                    d = d.min(x - bs[i - 1]);
                }
                d
            })
            .fold(0.0, f64::max);
    }
    if a.len().max(b.len()) <= BRUTE_FORCE_LIMIT {
        return a
            .iter()
            .map(|p| b.iter().map(|q| distance(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
    }
    GridIndex::new(b).directed_from(a)
}

/// Uniform grid over a point cloud for nearest-neighbour queries.
struct GridIndex<'a> {
    points: &'a [Point],
    cell: f64,
    origin: Vec<f64>,
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl<'a> GridIndex<'a> {
    fn new(points: &'a [Point]) -> Self {
        let n = points[0].len();
        let origin: Vec<f64> = (0..n).map(|i| points.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min)).collect();
        let extent = (0..n)
            .map(|i| points.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max) - origin[i])
            .fold(0.0, f64::max);
        let per_axis = (points.len() as f64).powf(1.0 / n as f64).max(1.0);
        let cell = if extent > 0.0 { extent / per_axis } else { 1.0 };
        let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            let key = (0..n).map(|k| ((p[k] - origin[k]) / cell).floor() as i64).collect();
            cells.entry(key).or_default().push(i);
        }
        GridIndex { points, cell, origin, cells }
    }

    fn nearest(&self, x: &[f64]) -> f64 {
        let n = x.len();
        let centre: Vec<i64> = (0..n).map(|k| ((x[k] - self.origin[k]) / self.cell).floor() as i64).collect();
        let mut best = f64::INFINITY;
        let mut r: i64 = 0;
        loop {
            // visit the shell of cells at Chebyshev radius r
            let side = 2 * r + 1;
            let total = side.pow(n as u32);
            for idx in 0..total {
                let mut rem = idx;
                let mut key = Vec::with_capacity(n);
                let mut on_shell = false;
                for k in 0..n {
                    let off = rem % side - r;
                    rem /= side;
                    on_shell |= off.abs() == r;
                    key.push(centre[k] + off);
                }
                if !on_shell {
                    continue;
                }
                if let Some(ids) = self.cells.get(&key) {
                    for &i in ids {
                        best = best.min(distance(x, &self.points[i]));
                    }
                }
            }
            if best <= r as f64 * self.cell {
                return best;
            }
            r += 1;
        }
    }

    fn directed_from(&self, a: &[Point]) -> f64 {
        a.iter().map(|p| self.nearest(p)).fold(0.0, f64::max)
    }
}

/// Box-counting dimension estimates from windowed slopes of `log N_ε` against `−log ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDimension {
    pub lower: f64,
    pub upper: f64,
    /// Slope over the whole ε-grid.
    pub slope: f64,
    pub window_slopes: Vec<f64>,
    pub eps: Vec<f64>,
    pub counts: Vec<usize>,
}

const BOX_WINDOWS: usize = 5;

/// Geometric ε-grid from `4·resolution` to a quarter of the cloud's extent.
pub fn default_eps_grid(cloud: &[Point], resolution: f64) -> Vec<f64> {
    let extent = cloud_extent(cloud);
    if extent == 0.0 {
        return geomspace(1e-6, 1.0, 40);
    }
    let lo = (4.0 * resolution).max(extent * 1e-7);
    let hi = extent / 4.0;
    if lo >= hi {
        return vec![hi];
    }
    geomspace(lo, hi, 40)
}

pub fn cloud_extent(cloud: &[Point]) -> f64 {
    if cloud.is_empty() {
        return 0.0;
    }
    let n = cloud[0].len();
    (0..n)
        .map(|i| {
            let lo = cloud.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min);
            let hi = cloud.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        })
        .fold(0.0, f64::max)
}

pub fn box_dimension_estimate(cloud: &[Point], eps: &[f64], resolution: f64) -> Result<BoxDimension> {
    if cloud.is_empty() || eps.len() < 2 {
        return Err(Error::InvalidSpec("box counting needs a cloud and at least two scales".into()));
    }
    let min_eps = eps.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eps < resolution {
        return Err(Error::EpsilonBelowResolution {
            eps: min_eps,
            resolution,
        });
    }
    let n = cloud[0].len();
    let origin: Vec<f64> = (0..n).map(|i| cloud.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min)).collect();
    let counts: Vec<usize> = eps
        .iter()
        .map(|&e| {
            let boxes: HashSet<Vec<i64>> = cloud
                .iter()
                .map(|p| (0..n).map(|k| ((p[k] - origin[k]) / e).floor() as i64).collect())
                .collect();
            boxes.len()
        })
        .collect();
    let xs: Vec<f64> = eps.iter().map(|e| -e.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let slope = linear_fit(&xs, &ys).map(|f| f.slope).unwrap_or(0.0);
    let m = xs.len();
    let width = (m / 2).max(2).min(m);
    let mut window_slopes = Vec::new();
    for w in 0..BOX_WINDOWS {
        let start = if BOX_WINDOWS > 1 { w * (m - width) / (BOX_WINDOWS - 1) } else { 0 };
        if let Some(f) = linear_fit(&xs[start..start + width], &ys[start..start + width]) {
            window_slopes.push(f.slope);
        }
    }
    let lower = window_slopes.iter().copied().fold(f64::INFINITY, f64::min).min(slope);
    let upper = window_slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max).max(slope);
    Ok(BoxDimension {
        lower,
        upper,
        slope,
        window_slopes,
        eps: eps.to_vec(),
        counts,
    })
}
