//! Operator families with closed-form traceability behaviour: the two-slope
//! and the step exemplars, with the `σ^{(γ)}` and `s^{(γ)}` ratio diagnostics.

mod ratios;
mod step;
mod two_slope;

pub use ratios::{s_ratio, sigma_ratio, Profile};
pub use step::{StepBreaks, StepSpec};
pub use two_slope::{Gaps, Pieces, TwoSlopeSpec};
