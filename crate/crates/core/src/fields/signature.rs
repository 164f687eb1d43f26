use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Genus and cone angles θᵢ ∈ (0, π) of a closed surface with marked points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeSignature {
    pub genus: u32,
    pub angles: Vec<f64>,
}

impl ConeSignature {
    /// Validates the angles and negativity of the cone Euler characteristic.
    pub fn new(genus: u32, angles: Vec<f64>) -> Result<Self> {
        let sig = ConeSignature { genus, angles };
        sig.validate()?;
        Ok(sig)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(a) = self.angles.iter().find(|a| !(**a > 0.0 && **a < PI)) {
            return Err(Error::InvalidSignature(format!("cone angle {a} outside (0, pi)")));
        }
        self.check_negative_euler()
    }

    /// Only the sign condition 2π(2−2g) + Σ(θᵢ − 2π) < 0, for any positive angles.
    pub fn check_negative_euler(&self) -> Result<()> {
        if let Some(a) = self.angles.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return Err(Error::InvalidSignature(format!("cone angle {a} must be positive")));
        }
        let total = 2.0 * PI * (2.0 - 2.0 * self.genus as f64) + self.angles.iter().map(|a| a - 2.0 * PI).sum::<f64>();
        if total >= 0.0 {
            return Err(Error::InvalidSignature(format!(
                "genus {} with {} cone points admits no hyperbolic cone metric",
                self.genus,
                self.angles.len()
            )));
        }
        Ok(())
    }

    /// χ(Σ) of the underlying closed surface.
    pub fn euler_characteristic(&self) -> f64 {
        2.0 - 2.0 * self.genus as f64
    }

    /// χ(Σ) + Σ(θᵢ/2π − 1).
    pub fn cone_euler_characteristic(&self) -> f64 {
        self.euler_characteristic() + self.angles.iter().map(|a| a / (2.0 * PI) - 1.0).sum::<f64>()
    }
}

/// Area of a closed cone surface of constant curvature `k` < 0.
pub fn gauss_bonnet_area(sig: &ConeSignature, k: f64) -> Result<f64> {
    if !(k < 0.0) || !k.is_finite() {
        return Err(Error::Domain(format!("curvature {k} must be negative")));
    }
    sig.check_negative_euler()?;
    Ok(2.0 * PI / k.abs() * sig.cone_euler_characteristic().abs())
}
