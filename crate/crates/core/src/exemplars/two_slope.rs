use std::sync::Arc;

use crate::asymptotics::EigenvalueSequence;
use crate::error::{Error, Result};

/// Gap sequence `a_1, a_2, …` (with `a_0 = 0`).
#[derive(Debug, Clone, PartialEq)]
pub enum Gaps {
    Constant(f64),
    /// `a_n = n`.
    Linear,
    /// Explicit values; the last one repeats forever.
    Custom(Vec<f64>),
}

impl Gaps {
    /// `a_n` for `n ≥ 1`.
    pub fn get(&self, n: usize) -> f64 {
        match self {
            Gaps::Constant(a) => *a,
            Gaps::Linear => n as f64,
            Gaps::Custom(v) => v[(n - 1).min(v.len() - 1)],
        }
    }
}

/// Two-slope exemplar: `f` has slope `α` on `[b_{2k}, b_{2k+1})` and `β` on
/// `[b_{2k+1}, b_{2k+2})`, with `b_n = a_1 + … + a_n`, and `μ(x) = e^{−f(log x)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSlopeSpec {
    pub alpha: f64,
    pub beta: f64,
    pub gaps: Gaps,
}

// Upper limit on the number of pieces walked when integrating a tail.
const MAX_PIECES: usize = 200_000;

impl TwoSlopeSpec {
    pub fn new(alpha: f64, beta: f64, gaps: Gaps) -> Result<Self> {
        let spec = TwoSlopeSpec { alpha, beta, gaps };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = (self.alpha, self.beta);
        if !(b > 0.0 && b <= a && a.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "slopes must satisfy 0 < beta <= alpha, got alpha={a}, beta={b}"
            )));
        }
        let ok = match &self.gaps {
            Gaps::Constant(c) => *c > 0.0 && c.is_finite(),
            Gaps::Linear => true,
            Gaps::Custom(v) => {
                !v.is_empty()
                    && v[0] > 0.0
                    && v.iter().all(|x| x.is_finite())
                    && v.windows(2).all(|w| w[1] >= w[0])
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(
                "gaps must be finite, nondecreasing, with a_1 > 0".into(),
            ))
        }
    }

    /// Breakpoints `b_0 … b_K` and values `f(b_k)` until `b_K ≥ t_max`.
    pub fn pieces(&self, t_max: f64) -> Pieces {
        let mut p = Pieces {
            alpha: self.alpha,
            beta: self.beta,
            b: vec![0.0],
            fb: vec![0.0],
        };
        let mut k = 0;
        while *p.b.last().unwrap() <= t_max {
            k += 1;
            p.push(self.gaps.get(k));
        }
        p
    }

    /// `f(t) = ∫₀ᵗ φ`.
    pub fn f(&self, t: f64) -> f64 {
        self.pieces(t).f(t)
    }

    /// `μ_n = e^{−f(log n)}` for `n ≤ cap`, evaluated lazily, with the tail
    /// `Σ_{k>cap} μ_k^p` approximated by `∫_{cap+1/2}^∞ μ(y)^p dy`.
    pub fn sequence(&self, cap: usize) -> Result<EigenvalueSequence> {
        self.validate()?;
        let pieces = Arc::new(self.pieces((cap as f64 + 1.0).ln() + 1.0));
        let p = pieces.clone();
        let spec = self.clone();
        let x0 = cap as f64 + 0.5;
        Ok(
            EigenvalueSequence::from_fn(move |n| (-p.f((n as f64).ln())).exp(), cap)?
                .with_tail(Arc::new(move |g| spec.s(g, x0).ok())),
        )
    }

    /// `σ^{(γ)}(x) = ∫₁ˣ μ(y)^γ dy`, integrated exactly piece by piece.
    pub fn sigma(&self, gamma: f64, x: f64) -> Result<f64> {
        if !(x >= 1.0) {
            return Err(Error::InvalidSpec(format!("sigma needs x >= 1, got {x}")));
        }
        let t = x.ln();
        let p = self.pieces(t);
        let mut acc = 0.0;
        for k in 0..p.b.len() - 1 {
            let (t0, t1) = (p.b[k], p.b[k + 1].min(t));
            if t0 >= t {
                break;
            }
            acc += piece_integral(t0, t1, p.fb[k], p.slope(k), gamma);
        }
        Ok(acc)
    }

    /// `s^{(γ)}(x) = ∫ₓ^∞ μ(y)^γ dy`; fails when the integral diverges.
    pub fn s(&self, gamma: f64, x: f64) -> Result<f64> {
        if !(x >= 1.0) {
            return Err(Error::InvalidSpec(format!("s needs x >= 1, got {x}")));
        }
        let t = x.ln();
        let mut p = self.pieces(t);
        let mut k = p.b.partition_point(|&b| b <= t) - 1;
        let mut acc = 0.0;
        let mut start = t;
        for _ in 0..MAX_PIECES {
            while k + 1 >= p.b.len() {
                p.push(self.gaps.get(p.b.len()));
            }
            let f0 = p.f(start);
            acc += piece_integral(start, p.b[k + 1], f0, p.slope(k), gamma);
            k += 1;
            start = p.b[k];
            // log of the integrand density e^{t − γ f(t)} at the piece boundary
            let log_density = start - gamma * p.fb[k];
            if log_density > 700.0 {
                break;
            }
            if k % 2 == 0 && acc > 0.0 && log_density.exp() < 1e-20 * acc {
                return Ok(acc);
            }
        }
        Err(Error::TailUnfittable(format!(
            "integral of mu^{gamma} diverges beyond x = {x}"
        )))
    }
}

/// Piecewise linear `f` on the breakpoints of a two-slope spec.
#[derive(Debug, Clone, PartialEq)]
pub struct Pieces {
    alpha: f64,
    beta: f64,
    /// `b_k`.
    pub b: Vec<f64>,
    /// `f(b_k)`.
    pub fb: Vec<f64>,
}

impl Pieces {
    fn push(&mut self, a: f64) {
        let k = self.b.len() - 1;
        let s = self.slope(k);
        self.fb.push(self.fb[k] + s * a);
        self.b.push(self.b[k] + a);
    }

    /// Slope on `[b_k, b_{k+1})`.
    pub fn slope(&self, k: usize) -> f64 {
        if k % 2 == 0 {
            self.alpha
        } else {
            self.beta
        }
    }

    pub fn f(&self, t: f64) -> f64 {
        let k = self.b.partition_point(|&b| b <= t).max(1) - 1;
        let k = k.min(self.b.len() - 2);
        self.fb[k] + self.slope(k) * (t - self.b[k])
    }
}

/// `∫_{t0}^{t1} e^{t − γ(f0 + s(t − t0))} dt`, the integral of `μ(y)^γ dy`
/// over `y ∈ [e^{t0}, e^{t1}]` on one linear piece.
pub(crate) fn piece_integral(t0: f64, t1: f64, f0: f64, s: f64, gamma: f64) -> f64 {
    let c = 1.0 - gamma * s;
    let len = t1 - t0;
    let scale = (t0 - gamma * f0).exp();
    if c == 0.0 {
        scale * len
    } else {
        scale * (c * len).exp_m1() / c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_slopes_are_harmonic() {
        let spec = TwoSlopeSpec::new(1.0, 1.0, Gaps::Linear).unwrap();
        let s = spec.sequence(1000).unwrap();
        for n in [1usize, 2, 7, 999] {
            assert!((s.get(n).unwrap() * n as f64 - 1.0).abs() < 1e-12);
        }
        assert!((spec.sigma(1.0, 50.0).unwrap() - 50f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn breakpoints_linear() {
        let spec = TwoSlopeSpec::new(2.0, 1.0, Gaps::Linear).unwrap();
        let p = spec.pieces(10.0);
        assert_eq!(&p.b[..5], &[0.0, 1.0, 3.0, 6.0, 10.0]);
        // f(1) = 2, f(3) = 4, f(6) = 10, f(10) = 14
        assert_eq!(&p.fb[..5], &[0.0, 2.0, 4.0, 10.0, 14.0]);
        assert_eq!(spec.f(4.0), 6.0);
    }

    #[test]
    fn tail_of_power_law() {
        // f(t) = 2t: μ(y) = y^{-2}, ∫ₓ^∞ y^{-2} = 1/x
        let spec = TwoSlopeSpec::new(2.0, 2.0, Gaps::Constant(1.0)).unwrap();
        assert!((spec.s(1.0, 10.0).unwrap() - 0.1).abs() < 1e-14);
        assert!(matches!(spec.s(0.4, 10.0), Err(Error::TailUnfittable(_))));
    }

    #[test]
    fn invalid_specs() {
        assert!(TwoSlopeSpec::new(1.0, 2.0, Gaps::Linear).is_err());
        assert!(TwoSlopeSpec::new(2.0, 1.0, Gaps::Custom(vec![2.0, 1.0])).is_err());
        assert!(TwoSlopeSpec::new(2.0, 1.0, Gaps::Constant(0.0)).is_err());
    }
}
