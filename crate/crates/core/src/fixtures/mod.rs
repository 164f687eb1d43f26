//! Reference surfaces, data and representations shared by tests, the CLI and the acceptance harness.

mod holonomy;

pub use holonomy::{genus_two_octagon_rep, one_holed_torus_rep, OCTAGON_INTERIOR_ANGLE};
mod surface;
pub use surface::{
    family_of, in_octagon, octagon_radii, vertex_distance, OctagonSurface, Perturbation, DEFAULT_RESOLUTION,
    MIN_RESOLUTION,
};
