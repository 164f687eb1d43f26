//! Möbius algebra in PSL₂(ℂ) and the model cone geometries.

mod model;
mod moebius;

pub use model::{ModelConeMetric, ModelKind, ModelTensor};
pub use moebius::{classify, elliptic_about_axis, Classification, IdealPoint, Moebius};
