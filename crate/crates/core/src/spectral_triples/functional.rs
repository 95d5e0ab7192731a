use std::collections::HashMap;

use crate::error::{Error, Result};

use super::model::SpectralModel;

/// Scalar functions applied at tag points through `(fξ)(x) = f(x)ξ(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    Constant(f64),
    /// `x ↦ ⟨gradient, x⟩ + offset`.
    Affine { gradient: Vec<f64>, offset: f64 },
    /// Indicator of the box `[lo, hi]` with a linear ramp of width `ramp` outside it.
    SmoothedIndicator { lo: Vec<f64>, hi: Vec<f64>, ramp: f64 },
    /// Tabulated values matched to the nearest point within `tolerance`.
    Table { points: Vec<(Vec<f64>, f64)>, tolerance: f64 },
}

impl TestFunction {
    pub fn validate(&self, dim: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        match self {
            TestFunction::Constant(c) if !c.is_finite() => bad("constant must be finite".into()),
            TestFunction::Affine { gradient, .. } if gradient.len() != dim => {
                bad(format!("gradient needs {dim} components"))
            }
            TestFunction::SmoothedIndicator { lo, hi, ramp } => {
                if lo.len() != dim || hi.len() != dim {
                    bad(format!("indicator box needs {dim} components"))
                } else if lo.iter().zip(hi).any(|(a, b)| a > b) {
                    bad("indicator box has lo > hi".into())
                } else if !(*ramp > 0.0) {
                    bad("ramp width must be positive".into())
                } else {
                    Ok(())
                }
            }
            TestFunction::Table { points, tolerance } => {
                if !(*tolerance > 0.0) {
                    bad("table tolerance must be positive".into())
                } else if points.iter().any(|(p, _)| p.len() != dim) {
                    bad(format!("table points need {dim} components"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Value at `x`; tables return `None` when no point is within tolerance.
    pub fn eval(&self, x: &[f64]) -> Option<f64> {
        match self {
            TestFunction::Constant(c) => Some(*c),
            TestFunction::Affine { gradient, offset } => {
                Some(gradient.iter().zip(x).map(|(g, v)| g * v).sum::<f64>() + offset)
            }
            TestFunction::SmoothedIndicator { lo, hi, ramp } => Some(
                x.iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(&v, (&a, &b))| {
                        let dist = (a - v).max(v - b).max(0.0);
                        (1.0 - dist / ramp).max(0.0)
                    })
                    .product(),
            ),
            TestFunction::Table { .. } => None,
        }
    }

    /// Upper bound on the Lipschitz constant (pairwise for tables).
    pub fn lipschitz(&self) -> f64 {
        match self {
            TestFunction::Constant(_) => 0.0,
            TestFunction::Affine { gradient, .. } => gradient.iter().map(|g| g * g).sum::<f64>().sqrt(),
            TestFunction::SmoothedIndicator { lo, ramp, .. } => (lo.len() as f64).sqrt() / ramp,
            TestFunction::Table { points, .. } => {
                let mut l: f64 = 0.0;
                for (i, (p, a)) in points.iter().enumerate() {
                    for (q, b) in &points[i + 1..] {
                        let d = crate::fractal_geometry::distance(p, q);
                        if d > 0.0 {
                            l = l.max((a - b).abs() / d);
                        }
                    }
                }
                l
            }
        }
    }
}

/// `f` evaluated on a model's tags: per eigen-entry, the average of `f` at
/// its two tag points.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalSample {
    pub values: Vec<f64>,
    pub lipschitz: f64,
}

struct TableIndex<'a> {
    points: &'a [(Vec<f64>, f64)],
    tol: f64,
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl<'a> TableIndex<'a> {
    fn new(points: &'a [(Vec<f64>, f64)], tol: f64) -> Self {
        let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, (p, _)) in points.iter().enumerate() {
            cells.entry(Self::cell(p, tol)).or_default().push(i);
        }
        TableIndex { points, tol, cells }
    }

    fn cell(p: &[f64], tol: f64) -> Vec<i64> {
        p.iter().map(|v| (v / tol).floor() as i64).collect()
    }

    fn lookup(&self, x: &[f64]) -> Option<f64> {
        let base = Self::cell(x, self.tol);
        let n = base.len();
        let mut best: Option<(f64, f64)> = None;
        for code in 0..3usize.pow(n as u32) {
            let mut key = base.clone();
            let mut c = code;
            for k in key.iter_mut() {
                *k += (c % 3) as i64 - 1;
                c /= 3;
            }
            for &i in self.cells.get(&key).into_iter().flatten() {
                let (p, v) = &self.points[i];
                let d = crate::fractal_geometry::distance(p, x);
                if d <= self.tol && best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, *v));
                }
            }
        }
        best.map(|b| b.1)
    }
}

pub fn sample<M: SpectralModel + ?Sized>(model: &M, f: &TestFunction) -> Result<FunctionalSample> {
    f.validate(model.dim())?;
    let n = model.eigen().cap();
    let index = match f {
        TestFunction::Table { points, tolerance } => Some(TableIndex::new(points, *tolerance)),
        _ => None,
    };
    let eval = |x: &[f64]| match &index {
        Some(t) => t.lookup(x),
        None => f.eval(x),
    };
    let mut values = Vec::with_capacity(n);
    for k in 1..=n {
        let (x, y) = model.tags(k);
        let (Some(a), Some(b)) = (eval(x), eval(y)) else {
            return Err(Error::UndefinedTag { index: k });
        };
        values.push(0.5 * (a + b));
    }
    Ok(FunctionalSample {
        values,
        lipschitz: f.lipschitz(),
    })
}
