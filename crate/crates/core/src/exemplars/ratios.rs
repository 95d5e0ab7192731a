use crate::asymptotics::{tail_estimate, EigenvalueSequence};
use crate::error::{Error, Result};

use super::{StepSpec, TwoSlopeSpec};

/// Where `μ(y)` comes from for the integral diagnostics.
#[derive(Debug, Clone, Copy)]
pub enum Profile<'a> {
    TwoSlope(&'a TwoSlopeSpec),
    Step(&'a StepSpec),
    /// `μ(y) = μ_n` for `y ∈ [n, n+1)`, limited to `y ≤ cap`.
    Sequence(&'a EigenvalueSequence),
}

impl Profile<'_> {
    pub fn sigma(&self, gamma: f64, x: f64) -> Result<f64> {
        match self {
            Profile::TwoSlope(s) => s.sigma(gamma, x),
            Profile::Step(s) => s.sigma(gamma, x),
            Profile::Sequence(seq) => sequence_sigma(seq, gamma, x),
        }
    }

    pub fn s(&self, gamma: f64, x: f64) -> Result<f64> {
        match self {
            Profile::TwoSlope(s) => s.s(gamma, x),
            Profile::Step(s) => s.s(gamma, x),
            Profile::Sequence(seq) => sequence_s(seq, gamma, x),
        }
    }
}

fn check_args(x: f64, lambda: f64) -> Result<()> {
    if !(lambda > 1.0) || !(x >= 1.0) {
        return Err(Error::InvalidSpec(format!(
            "ratio needs lambda > 1 and x >= 1, got lambda={lambda}, x={x}"
        )));
    }
    Ok(())
}

fn check_cap(cap: Option<usize>, y: f64) -> Result<()> {
    match cap {
        Some(c) if y > c as f64 => Err(Error::CapExceeded {
            index: y.ceil() as usize,
            cap: c,
        }),
        _ => Ok(()),
    }
}

/// `σ^{(γ)}(λx) / σ^{(γ)}(x)`. `cap` bounds `λx` for exemplar profiles.
pub fn sigma_ratio(
    profile: Profile<'_>,
    gamma: f64,
    x: f64,
    lambda: f64,
    cap: Option<usize>,
) -> Result<f64> {
    check_args(x, lambda)?;
    check_cap(cap, lambda * x)?;
    Ok(profile.sigma(gamma, lambda * x)? / profile.sigma(gamma, x)?)
}

/// `s^{(γ)}(x/λ) / s^{(γ)}(x)`.
pub fn s_ratio(
    profile: Profile<'_>,
    gamma: f64,
    x: f64,
    lambda: f64,
    cap: Option<usize>,
) -> Result<f64> {
    check_args(x, lambda)?;
    check_cap(cap, x)?;
    let lo = (x / lambda).max(1.0);
    Ok(profile.s(gamma, lo)? / profile.s(gamma, x)?)
}

fn sequence_sigma(seq: &EigenvalueSequence, gamma: f64, x: f64) -> Result<f64> {
    let whole = x.floor() as usize;
    if x > seq.cap() as f64 + 1.0 || whole == 0 {
        return Err(Error::CapExceeded {
            index: whole,
            cap: seq.cap(),
        });
    }
    let p = seq.power(gamma)?;
    let mut acc = 0.0;
    for n in 1..whole {
        acc += p.value(n);
    }
    if x > whole as f64 {
        acc += (x - whole as f64) * p.value(whole);
    }
    Ok(acc)
}

fn sequence_s(seq: &EigenvalueSequence, gamma: f64, x: f64) -> Result<f64> {
    let whole = x.floor() as usize;
    if whole > seq.cap() || whole == 0 {
        return Err(Error::CapExceeded {
            index: whole,
            cap: seq.cap(),
        });
    }
    let p = seq.power(gamma)?;
    let mut acc = tail_estimate(&p)?.remainder;
    for n in (whole + 1..=p.cap()).rev() {
        acc += p.value(n);
    }
    acc += (whole as f64 + 1.0 - x) * p.value(whole);
    Ok(acc)
}
