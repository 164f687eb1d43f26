use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    /// dr² + sinh²r dα², coordinates (r, α).
    H2Cone,
    /// dρ² + cosh²ρ (dr² + sinh²r dα²), coordinates (ρ, r, α).
    H3Cone,
    /// −dt² + cosh²t (dφ² + sin²φ dα²), coordinates (t, φ, α).
    DS3Cone,
}

/// A model cone geometry with angle θ₀ around its singular locus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConeMetric {
    pub kind: ModelKind,
    pub angle: f64,
}

/// Component matrix of a model metric, diagonal in the model coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelTensor {
    Dim2([[f64; 2]; 2]),
    Dim3([[f64; 3]; 3]),
}

impl ModelTensor {
    pub fn diagonal(&self) -> Vec<f64> {
        match self {
            ModelTensor::Dim2(m) => vec![m[0][0], m[1][1]],
            ModelTensor::Dim3(m) => vec![m[0][0], m[1][1], m[2][2]],
        }
    }
}

impl ModelConeMetric {
    pub fn new(kind: ModelKind, angle: f64) -> Result<Self> {
        if !(angle > 0.0) || !angle.is_finite() {
            return Err(Error::OutOfDomain(format!("cone angle {angle} must be positive")));
        }
        Ok(ModelConeMetric { kind, angle })
    }

    pub fn dimension(&self) -> usize {
        match self.kind {
            ModelKind::H2Cone => 2,
            _ => 3,
        }
    }

    /// Closed-form components at `point`. The α coordinate is read modulo θ₀
    /// and does not enter the components.
    pub fn eval(&self, point: &[f64]) -> Result<ModelTensor> {
        if point.len() != self.dimension() || point.iter().any(|v| !v.is_finite()) {
            return Err(Error::OutOfDomain(format!(
                "expected {} finite coordinates, got {:?}",
                self.dimension(),
                point
            )));
        }
        match self.kind {
            ModelKind::H2Cone => {
                let r = point[0];
                if r <= 0.0 {
                    return Err(Error::OutOfDomain(format!("r = {r} must be positive")));
                }
                Ok(ModelTensor::Dim2([[1.0, 0.0], [0.0, r.sinh().powi(2)]]))
            }
            ModelKind::H3Cone => {
                let (rho, r) = (point[0], point[1]);
                if r <= 0.0 {
                    return Err(Error::OutOfDomain(format!("r = {r} must be positive")));
                }
                let w = rho.cosh().powi(2);
                Ok(ModelTensor::Dim3([[1.0, 0.0, 0.0], [0.0, w, 0.0], [0.0, 0.0, w * r.sinh().powi(2)]]))
            }
            ModelKind::DS3Cone => {
                let (t, phi) = (point[0], point[1]);
                if !(phi > 0.0 && phi < std::f64::consts::PI) {
                    return Err(Error::OutOfDomain(format!("phi = {phi} must lie in (0, pi)")));
                }
                let w = t.cosh().powi(2);
                Ok(ModelTensor::Dim3([[-1.0, 0.0, 0.0], [0.0, w, 0.0], [0.0, 0.0, w * phi.sin().powi(2)]]))
            }
        }
    }
}
