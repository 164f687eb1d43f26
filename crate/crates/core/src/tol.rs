use serde::{Deserialize, Serialize};

/// Tolerances shared by the verifiers. Every value must be positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative tolerance for closed-form identities.
    pub closed_form: f64,
    /// Pointwise tolerance for self-adjointness and determinant checks.
    pub pointwise: f64,
    /// Absolute floor below which a finite-difference residual counts as zero.
    pub residual_floor: f64,
    /// Minimal decay order demanded by refinement checks under grid halving.
    pub refinement_order: f64,
    /// Tolerance on the trace identity of Condition (*).
    pub trace_identity: f64,
    /// Upper bound on |det B*| accepted as bounded.
    pub det_bound: f64,
    /// Newton residual target for graph leaves.
    pub newton: f64,
    /// Residual target for closed-form (homogeneous) leaves.
    pub leaf: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            closed_form: 1e-10,
            pointwise: 1e-8,
            residual_floor: 1e-9,
            refinement_order: 1.0,
            trace_identity: 1e-6,
            det_bound: 1e8,
            newton: 1e-6,
            leaf: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> crate::Result<()> {
        let all = [
            self.closed_form,
            self.pointwise,
            self.residual_floor,
            self.refinement_order,
            self.trace_identity,
            self.det_bound,
            self.newton,
            self.leaf,
        ];
        if all.iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(())
        } else {
            Err(crate::Error::Domain("tolerances must be positive".into()))
        }
    }
}
