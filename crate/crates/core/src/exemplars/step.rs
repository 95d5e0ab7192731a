use std::sync::Arc;

use crate::asymptotics::EigenvalueSequence;
use crate::error::{Error, Result};

/// Source of the integer breakpoints `x_n = e^{b_n}`.
#[derive(Debug, Clone, PartialEq)]
pub enum StepBreaks {
    /// `x_n = round(e^{n^q})`, `q > 1`.
    Power { q: f64 },
    /// Explicit `x_1 < x_2 < …` (with `x_0 = 1` implied).
    Custom(Vec<f64>),
}

/// Step exemplar: `μ(x) = 1/x_n` for `x_{n−1} < x ≤ x_n`, and `μ_1 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSpec {
    pub breaks: StepBreaks,
}

// Beyond this the breakpoints no longer fit the f64 exponent range.
const MAX_LOG_BREAK: f64 = 700.0;

impl StepSpec {
    pub fn power(q: f64) -> Result<Self> {
        if !(q > 1.0 && q.is_finite()) {
            return Err(Error::InvalidSpec(format!("step exponent q must exceed 1, got {q}")));
        }
        Ok(StepSpec {
            breaks: StepBreaks::Power { q },
        })
    }

    /// `x_0 = 1, x_1, …` up to the first breakpoint beyond `limit`, followed
    /// by `extra` more (where available).
    pub fn breakpoints(&self, limit: f64, extra: usize) -> Result<Vec<f64>> {
        let mut xs = vec![1.0];
        let mut beyond = 0usize;
        let mut n = 1usize;
        loop {
            let x = match &self.breaks {
                StepBreaks::Power { q } => {
                    let b = (n as f64).powf(*q);
                    if b > MAX_LOG_BREAK {
                        break;
                    }
                    b.exp().round()
                }
                StepBreaks::Custom(v) => match v.get(n - 1) {
                    Some(&x) => x,
                    None => break,
                },
            };
            xs.push(x);
            if x > limit {
                beyond += 1;
                if beyond > extra {
                    break;
                }
            }
            n += 1;
        }
        self.check(&xs)?;
        if *xs.last().unwrap() <= limit {
            return Err(Error::InvalidSpec(format!(
                "breakpoints end at {} before reaching {limit}",
                xs.last().unwrap()
            )));
        }
        Ok(xs)
    }

    fn check(&self, xs: &[f64]) -> Result<()> {
        for (i, w) in xs.windows(2).enumerate() {
            if !(w[1] > w[0]) || w[1].fract() != 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "breakpoint x_{} = {} must be an integer above x_{} = {}",
                    i + 1,
                    w[1],
                    i,
                    w[0]
                )));
            }
        }
        // gaps b_{n+1} − b_n must keep growing
        let logs: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let diffs: Vec<f64> = logs.windows(2).map(|w| w[1] - w[0]).collect();
        for (i, w) in diffs.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::SpecNotDiverging { index: i + 1 });
            }
        }
        Ok(())
    }

    /// Piecewise-constant sequence up to `cap`, with its exact tail attached.
    pub fn sequence(&self, cap: usize) -> Result<EigenvalueSequence> {
        let xs = Arc::new(self.breakpoints(cap as f64, 8)?);
        let lookup = xs.clone();
        let tail_xs = xs.clone();
        let seq = EigenvalueSequence::from_fn(move |n| value_at(&lookup, n as f64), cap)?
            .with_tail(Arc::new(move |p| block_tail(&tail_xs, cap as f64, p)));
        Ok(seq)
    }

    /// `σ^{(γ)}(x) = ∫₁ˣ μ(y)^γ dy`.
    pub fn sigma(&self, gamma: f64, x: f64) -> Result<f64> {
        let xs = self.breakpoints(x, 0)?;
        let mut acc = 0.0;
        for w in xs.windows(2) {
            let hi = w[1].min(x);
            if hi <= w[0] {
                break;
            }
            acc += (hi - w[0]) * w[1].powf(-gamma);
        }
        Ok(acc)
    }

    /// `s^{(γ)}(x) = ∫ₓ^∞ μ(y)^γ dy`.
    pub fn s(&self, gamma: f64, x: f64) -> Result<f64> {
        let xs = self.breakpoints(x, 64)?;
        block_tail(&xs, x, gamma).ok_or_else(|| {
            Error::TailUnfittable(format!("integral of mu^{gamma} diverges beyond x = {x}"))
        })
    }
}

fn value_at(xs: &[f64], y: f64) -> f64 {
    if y <= 1.0 {
        return 1.0;
    }
    let k = xs.partition_point(|&x| x < y);
    1.0 / xs[k]
}

/// `∫_from^∞ μ(y)^p dy` summed block by block; `None` when it does not converge.
fn block_tail(xs: &[f64], from: f64, p: f64) -> Option<f64> {
    if p <= 1.0 {
        return None;
    }
    let mut acc = 0.0;
    for w in xs.windows(2) {
        if w[1] <= from {
            continue;
        }
        let lo = w[0].max(from);
        let term = (w[1] - lo) * w[1].powf(-p);
        acc += term;
        if term < 1e-20 * acc {
            return Some(acc);
        }
    }
    // remaining blocks are bounded by the geometric decay of x^{1−p}
    let last = *xs.last()?;
    let bound = last.powf(1.0 - p);
    (bound < 1e-15 * acc).then_some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q2_breakpoints() {
        let spec = StepSpec::power(2.0).unwrap();
        let xs = spec.breakpoints(1e6, 0).unwrap();
        assert_eq!(xs, vec![1.0, 3.0, 55.0, 8103.0, 8886111.0]);
    }

    #[test]
    fn values_are_reciprocal_breaks() {
        let s = StepSpec::power(2.0).unwrap().sequence(100).unwrap();
        let v = s.to_vec();
        assert_eq!(v[0], 1.0);
        assert_eq!(v[1], 1.0 / 3.0);
        assert_eq!(v[2], 1.0 / 3.0);
        assert_eq!(v[3], 1.0 / 55.0);
        assert_eq!(v[54], 1.0 / 55.0);
        assert_eq!(v[55], 1.0 / 8103.0);
    }

    #[test]
    fn not_diverging() {
        let spec = StepSpec {
            breaks: StepBreaks::Custom(vec![10.0, 100.0, 1000.0, 20000.0]),
        };
        assert!(matches!(
            spec.breakpoints(5000.0, 0),
            Err(Error::SpecNotDiverging { .. })
        ));
    }

    #[test]
    fn tail_sum_matches_direct() {
        let spec = StepSpec::power(2.0).unwrap();
        let s = spec.sequence(1000).unwrap().power(2.0).unwrap();
        // Σ_{k>1000} μ_k² = (8103 − 1000)/8103² + (8886111 − 8103)/8886111² + …
        let x5 = 25f64.exp().round();
        let direct = 7103.0 / 8103f64.powi(2)
            + (8886111.0 - 8103.0) / 8886111f64.powi(2)
            + (x5 - 8886111.0) / (x5 * x5);
        let t = s.closed_tail().unwrap();
        assert!((t - direct).abs() < 1e-9 * direct, "{t} vs {direct}");
    }
}
