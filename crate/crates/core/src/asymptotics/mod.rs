//! Eigenvalue asymptotics: partial sums, order of infinitesimal, the `c̲`/`c̄`
//! bounds, ideal membership, eccentricity and singular traces.

mod eccentricity;
mod ideal;
mod order;
mod profile;
mod sequence;
mod sums;
mod trace;

pub use eccentricity::{
    eccentricity_scan, eccentricity_scan_auto, scan_grid, EccentricityScan, GapTrend, DEFAULT_TOLERANCE, GRID_RATIO,
};
pub use ideal::{classify_ideal, IdealClass, IdealReport, MIN_EXPONENT_MARGIN, MIN_LOG_MARGIN};
pub use order::{order_from_profile, order_of_infinitesimal, OrderEstimate, MIN_ORDER_CAP};
pub use profile::{c_bounds, CBounds, LogProfile, DEFAULT_DT};
pub use sequence::{EigenvalueSequence, TailFn};
pub use sums::{partial_sums, tail_estimate, PartialSumSeries, SumKind, TailEstimate};
pub use trace::{
    analyze, dixmier_trace_estimate, kind_for, require_traceable, singular_trace_estimate,
    DixmierEstimate, TraceEstimate, TraceMethod, TraceabilityReport, MEASURABLE_BAND,
};
