use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;

use crate::error::{Error, Result};

type ValueFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// `tail(p)` returns `Σ_{k>cap} μ_k^p` for the underlying base sequence, when known in closed form.
pub type TailFn = Arc<dyn Fn(f64) -> Option<f64> + Send + Sync>;

// Relative slack tolerated when checking monotonicity of values produced by
// floating point formulas.
const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Clone)]
enum Source {
    Table(Arc<[f64]>),
    Func(ValueFn),
}

/// Nonincreasing positive sequence `μ_1 ≥ μ_2 ≥ …`, indexed from 1.
///
/// A sequence is either *exhausted* (finite, implicitly followed by zeros) or
/// a capped view of an infinite sequence. Values are produced on demand; a
/// power `μ_n^p` is kept symbolic so that closed-form tails stay available.
#[derive(Clone)]
pub struct EigenvalueSequence {
    source: Source,
    exponent: f64,
    cap: usize,
    exhausted: bool,
    tail: Option<TailFn>,
}

impl fmt::Debug for EigenvalueSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EigenvalueSequence")
            .field(
                "source",
                &match self.source {
                    Source::Table(_) => "table",
                    Source::Func(_) => "fn",
                },
            )
            .field("exponent", &self.exponent)
            .field("cap", &self.cap)
            .field("exhausted", &self.exhausted)
            .field("closed_tail", &self.tail.is_some())
            .finish()
    }
}

impl EigenvalueSequence {
    /// Finite sequence; everything past the last value is zero.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        validate(values.iter().copied(), false)?;
        Ok(EigenvalueSequence {
            cap: values.len(),
            source: Source::Table(values.into()),
            exponent: 1.0,
            exhausted: true,
            tail: None,
        })
    }

    /// The first `values.len()` terms of an infinite sequence.
    pub fn from_prefix(values: Vec<f64>) -> Result<Self> {
        validate(values.iter().copied(), true)?;
        Ok(EigenvalueSequence {
            cap: values.len(),
            source: Source::Table(values.into()),
            exponent: 1.0,
            exhausted: false,
            tail: None,
        })
    }

    /// Infinite sequence given by `f(n)`, observed up to `cap`.
    ///
    /// All `cap` values are checked once at construction.
    pub fn from_fn<F>(f: F, cap: usize) -> Result<Self>
    where
        F: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        validate((1..=cap).map(&f), true)?;
        Ok(EigenvalueSequence {
            source: Source::Func(Arc::new(f)),
            exponent: 1.0,
            cap,
            exhausted: false,
            tail: None,
        })
    }

    /// Attach a closed-form tail `p ↦ Σ_{k>cap} μ_k^p`.
    pub fn with_tail(mut self, tail: TailFn) -> Self {
        self.tail = Some(tail);
        self
    }

    /// Same values observed with a different cap (functional sources only;
    /// tables are truncated).
    pub fn with_cap(&self, cap: usize) -> Result<Self> {
        match &self.source {
            Source::Table(v) => {
                if cap > v.len() {
                    return Err(Error::CapExceeded {
                        index: cap,
                        cap: v.len(),
                    });
                }
                let mut out = self.clone();
                out.cap = cap;
                out.exhausted = self.exhausted && cap == v.len();
                if cap < v.len() {
                    out.tail = None;
                }
                Ok(out)
            }
            Source::Func(f) => {
                if cap > self.cap {
                    validate((self.cap + 1..=cap).map(|n| f(n)), true)?;
                }
                let mut out = self.clone();
                out.cap = cap;
                if cap != self.cap {
                    out.tail = None;
                }
                Ok(out)
            }
        }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// `μ_n` for `1 ≤ n ≤ cap`.
    pub fn get(&self, n: usize) -> Result<f64> {
        if n == 0 || n > self.cap {
            return Err(Error::CapExceeded {
                index: n,
                cap: self.cap,
            });
        }
        Ok(self.value(n))
    }

    #[inline]
    pub(crate) fn value(&self, n: usize) -> f64 {
        let base = match &self.source {
            Source::Table(v) => v[n - 1],
            Source::Func(f) => f(n),
        };
        if self.exponent == 1.0 {
            base
        } else {
            base.powf(self.exponent)
        }
    }

    /// Values `μ_1 … μ_cap` in order.
    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=self.cap).map(move |n| self.value(n))
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.iter().collect()
    }

    /// `μ_n ↦ μ_n^α`.
    pub fn power(&self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "power exponent must be positive, got {alpha}"
            )));
        }
        let mut out = self.clone();
        out.exponent = self.exponent * alpha;
        Ok(out)
    }

    /// Closed-form `Σ_{k>cap} μ_k` when the sequence is exhausted or carries a tail formula.
    pub fn closed_tail(&self) -> Option<f64> {
        if self.exhausted {
            return Some(0.0);
        }
        self.tail.as_ref().and_then(|t| t(self.exponent))
    }

    /// Columnar text form with header `n,mu_n`.
    pub fn write_csv<W: Write>(&self, mut w: W, upto: usize) -> io::Result<()> {
        writeln!(w, "n,mu_n")?;
        for n in 1..=upto.min(self.cap) {
            writeln!(w, "{},{:.16e}", n, self.value(n))?;
        }
        Ok(())
    }
}

fn validate<I: Iterator<Item = f64>>(values: I, infinite: bool) -> Result<()> {
    let mut first = None;
    let mut prev = f64::INFINITY;
    let mut last = f64::NAN;
    let mut count = 0usize;
    for (i, v) in values.enumerate() {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::NotPositive { index: i + 1 });
        }
        if v > prev * (1.0 + MONOTONE_SLACK) {
            return Err(Error::NotMonotone { index: i + 1 });
        }
        first.get_or_insert(v);
        prev = v;
        last = v;
        count += 1;
    }
    if infinite {
        match first {
            None => return Err(Error::InvalidSpec("empty sequence".into())),
            Some(f) if count > 1 && last >= f => return Err(Error::NotVanishing),
            _ => {}
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_power_and_get() {
        let s = EigenvalueSequence::from_fn(|n| 1.0 / n as f64, 100).unwrap();
        let sq = s.power(2.0).unwrap();
        assert_eq!(sq.get(4).unwrap(), 1.0 / 16.0);
        assert_eq!(s.power(1.0).unwrap().to_vec(), s.to_vec());
        assert!(matches!(s.get(101), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            EigenvalueSequence::from_values(vec![1.0, 2.0]),
            Err(Error::NotMonotone { index: 2 })
        ));
        assert!(matches!(
            EigenvalueSequence::from_values(vec![1.0, 0.0]),
            Err(Error::NotPositive { index: 2 })
        ));
        assert!(matches!(
            EigenvalueSequence::from_fn(|_| 1.0, 10),
            Err(Error::NotVanishing)
        ));
        // a finite constant list is fine: zeros follow
        assert!(EigenvalueSequence::from_values(vec![1.0, 1.0]).is_ok());
    }

    #[test]
    fn csv_header() {
        let s = EigenvalueSequence::from_values(vec![1.0, 0.5]).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf, 10).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,mu_n\n1,1.0000000000000000e0\n"));
    }
}
