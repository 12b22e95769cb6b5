//! Substitution tilings, welded tile complexes, circle-packing
//! approximations of their conformal structure, and shape-convergence
//! measurements of aggregate tiles.
//!
//! Pipeline: load a substitution rule, subdivide a prototile into a patch,
//! weld the patch into a combinatorial complex, circle-pack a refined
//! triangulation of that complex, trace the aggregate boundary through the
//! packed circle centers, and compare the normalized shape against the
//! Euclidean prototile across subdivision depths.

pub mod affine;
pub mod complex;
pub mod error;
pub mod geom;
pub mod io;
pub mod packing;
pub mod patch;
pub mod render;
pub mod rules;
pub mod series;
pub mod shape;

pub use error::{Error, Result};
