use thiserror::Error;

use crate::asymptotics::IdealClass;

/// Errors raised by the numerical operations of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {index} exceeds the sequence cap {cap}")]
    CapExceeded { index: usize, cap: usize },

    #[error("tail cannot be fitted by a summable power law: {0}")]
    TailUnfittable(String),

    #[error("h grid too coarse: smallest usable h {h} is below 2 x grid step {dt}")]
    GridTooCoarse { h: f64, dt: f64 },

    #[error("empty eccentric subsequence")]
    EmptySubsequence,

    #[error("sequence is not in L^(1,inf) at exponent 1 (classified {0:?})")]
    NotL1Weak(IdealClass),

    #[error("sequence not traceable at exponent 1: no eccentric index, best gap {min_gap}")]
    NotTraceableAt1 { min_gap: f64 },

    #[error("sequence is not nonincreasing at index {index}")]
    NotMonotone { index: usize },

    #[error("sequence value at index {index} is not strictly positive and finite")]
    NotPositive { index: usize },

    #[error("sequence does not decrease anywhere up to its cap")]
    NotVanishing,

    #[error("gaps b_(n+1) - b_n stop growing at level {index}")]
    SpecNotDiverging { index: usize },

    #[error("sum of contraction products diverges over the generated range")]
    DivergentSpec,

    #[error("word budget exceeded: {needed} words requested, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("epsilon {eps} is below the cloud resolution {resolution}")]
    EpsilonBelowResolution { eps: f64, resolution: f64 },

    #[error("images overlap or are out of order at level {level}")]
    OverlappingImages { level: usize },

    #[error("gap truncation too coarse: omitted tail changes vol S_eps by {relative:.3e}")]
    TruncationTooCoarse { relative: f64 },

    #[error("seed points coincide")]
    SeedCoincident,

    #[error("zeta exponent s = {s} is not above the dimension {d}")]
    SBelowDimension { s: f64, d: f64 },

    #[error("function undefined at tag point of entry {index}")]
    UndefinedTag { index: usize },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
