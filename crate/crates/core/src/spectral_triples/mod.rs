//! Gap triples on ℝ and pair-of-points triples on ℝⁿ: eigenvalue models,
//! dimensions, zeta functions and Hausdorff functionals.

mod functional;
mod gap;
mod model;
mod ops;
mod pair;

pub use functional::{sample, FunctionalSample, TestFunction};
pub use gap::{gap_triple, gap_triple_of_ifs, GapTripleModel};
pub use model::{spectral_dimension, SpectralDimension, SpectralModel};
pub use ops::{
    hausdorff_functional, minkowski_link_check, pair_zeta_partial, zeta_partial, zeta_residue,
    LinkCheck, ZetaPartial, ZetaResidue, LINK_BAND,
};
pub use pair::{default_seed, pair_triple, Enumeration, PairTripleModel, DEFAULT_ENTRY_BUDGET};
