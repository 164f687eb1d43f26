//! Hyperbolic ends and de Sitter spacetimes with cone singularities.
//!
//! The crate is organised bottom-up: [`geom`] holds Möbius algebra and the
//! model cone metrics, [`fields`] the sampled tensor fields on a chart atlas,
//! [`infinity`] the data at infinity built from quadratic differentials,
//! [`family`] the equidistant surface families, [`foliation`] constant
//! curvature leaves and duality, [`grafting`] holonomy of grafted structures
//! and [`schwarzian`] the Schwarzian derivative analysis near cone points.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod family;
pub mod fields;
pub mod fixtures;
pub mod foliation;
pub mod geom;
pub mod grafting;
pub mod infinity;
pub mod linalg;
pub mod schwarzian;
pub mod tol;

pub use error::{Error, Result};
pub use num_complex::Complex64;
