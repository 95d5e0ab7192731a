//! Singular traces and spectral dimensions of fractal spectral triples,
//! computed from eigenvalue asymptotics.

pub mod asymptotics;
pub mod error;
pub mod exemplars;
pub mod fractal_geometry;
pub mod spectral_triples;
pub mod stats;

pub use error::{Error, Result};

/// Matrix types used by [`fractal_geometry::Similarity::new`].
pub use nalgebra;
