//! Small numerical helpers shared by the estimators.

/// Ordinary least squares fit `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub slope_se: f64,
    /// Root mean square of the residuals.
    pub rms_residual: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    let slope_se = if n > 2 {
        (ss_res / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some(LinearFit {
        slope,
        intercept,
        slope_se,
        rms_residual: (ss_res / nf).sqrt(),
    })
}

/// Least squares `y ≈ Σ_j β_j x_j` over the given regressor columns,
/// returning `(β, standard errors)`.
pub fn multi_fit(columns: &[Vec<f64>], ys: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    use nalgebra::{DMatrix, DVector};
    let n = ys.len();
    let p = columns.len();
    if n <= p || columns.iter().any(|c| c.len() != n) {
        return None;
    }
    let x = DMatrix::from_fn(n, p, |i, j| columns[j][i]);
    let y = DVector::from_column_slice(ys);
    let xtx = x.transpose() * &x;
    let inv = xtx.try_inverse()?;
    let beta = &inv * x.transpose() * &y;
    let resid = &y - &x * &beta;
    let sigma2 = resid.norm_squared() / (n - p) as f64;
    let se = (0..p).map(|j| (sigma2 * inv[(j, j)]).max(0.0).sqrt()).collect();
    Some((beta.iter().copied().collect(), se))
}

/// `count` points geometrically spaced from `lo` to `hi` inclusive.
pub fn geomspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Closed interval used for confidence intervals and oscillation bands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Self {
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn from_values<I: IntoIterator<Item = f64>>(values: I) -> Option<Self> {
        let mut it = values.into_iter();
        let first = it.next()?;
        let (lo, hi) = it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v)));
        Some(Interval { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, x: f64) -> Self {
        Interval {
            lo: self.lo.min(x),
            hi: self.hi.max(x),
        }
    }

    /// Reciprocal of a positive interval, with `1/0 = inf`.
    pub fn recip(&self) -> Self {
        Interval::new(recip(self.hi), recip(self.lo))
    }
}

pub(crate) fn recip(x: f64) -> f64 {
    if x <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 0.5 * x).collect();
        let fit = linear_fit(&xs, &ys).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-14);
        assert!((fit.intercept - 3.0).abs() < 1e-13);
        assert!(fit.slope_se < 1e-12);
    }

    #[test]
    fn multi_fit_recovers_plane() {
        let a: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let b: Vec<f64> = a.iter().map(|x| (x + 1.0).ln()).collect();
        let ones = vec![1.0; 20];
        let y: Vec<f64> = a.iter().zip(&b).map(|(x, l)| 2.0 - x + 3.0 * l).collect();
        let (beta, se) = multi_fit(&[ones, a, b], &y).unwrap();
        assert!((beta[0] - 2.0).abs() < 1e-9 && (beta[1] + 1.0).abs() < 1e-9 && (beta[2] - 3.0).abs() < 1e-9);
        assert!(se.iter().all(|s| *s < 1e-6));
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-16);
        }
        assert!((s.value() - (1.0 + 1e-15)).abs() < 1e-18);
    }

    #[test]
    fn interval_recip_handles_zero() {
        let i = Interval::new(0.0, 2.0).recip();
        assert_eq!(i.lo, 0.5);
        assert!(i.hi.is_infinite());
    }
}
