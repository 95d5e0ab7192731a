//! Iterated function systems, limit fractals and their classical dimensions,
//! measures and Minkowski contents.

mod cloud;
mod gaps;
mod ifs;
mod measure;
mod similarity;

pub use cloud::{
    attractor_cloud, box_dimension_estimate, cloud_extent, contraction_limit, default_eps_grid,
    hausdorff_distance, BoxDimension, ContractionResult, Point, DEFAULT_WORD_BUDGET,
};
pub use gaps::{
    attractor_hull, exact_gaps_from_interval_ifs, gaps_from_interval_ifs, largest_gaps,
    minkowski_content_estimate, tube_volume, ExactGapList, Gap, GapList, MinkowskiEstimate,
    MINKOWSKI_EPS_RATIO,
};
pub use ifs::{
    is_lattice, osc_evidence, similarity_dimension, similarity_dimension_of,
    translation_dimension_formula, Generation, LimitIfs, OscEvidence, TranslationDimension, Word,
};
pub use measure::{cylinder_measure, level_probabilities, CylinderMeasure};
pub use similarity::{distance, parse_rational, Affine, RationalLineMap, Similarity};
