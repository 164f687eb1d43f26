//! Sampled tensor fields on a chart atlas with polar charts at cone points.

mod atlas;
mod curvature;
pub mod diff;
mod field;
pub mod io;
mod normalized;
mod signature;

pub use atlas::{Axis, Chart, ChartAtlas, ConeSector, Grid, Overlap, OverlapMap};
pub use curvature::{
    area, brioschi, christoffel, codazzi_refinement, codazzi_residual, curvature_via_morphism, differential,
    eigenvalue_fields, gauss_curvature, hessian, laplacian, refinement_check, ring_profile, ring_slope,
    RefinementReport, EDGE_MARGIN,
};
pub use field::{ComplexField, Field, MetricField, OperatorField, ScalarField, Tensorial};
pub use normalized::{verify_normalized_pair, CheckItem, NormalizedPairReport};
pub use signature::{gauss_bonnet_area, ConeSignature};
