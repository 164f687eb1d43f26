//! Constant-curvature leaves of an end and its dual spacetime, the surface
//! duality between the two sides, and the embedding data built from
//! normalized metric pairs.

mod leaf;

pub use leaf::{
    attainable_range, foliation_sweep, graph_geometry, pointwise_param, solve_leaf, ChartSolve, FoliationLeaf,
    SolveMethod, SolverOptions, SweepReport, SweepRow, AREA_TOLERANCE,
};

use crate::family::Side;
use crate::fields::{
    codazzi_refinement, gauss_curvature, refinement_check, verify_normalized_pair, MetricField, OperatorField,
    RefinementReport, ScalarField,
};
use crate::linalg::{self_adjoint_residual, Mat2};
use crate::tol::Tolerances;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// K ↦ K/(K+1), from (−1, 0) onto (−∞, 0).
pub fn dual_curvature(k: f64) -> Result<f64> {
    if !(k > -1.0 && k < 0.0) {
        return Err(Error::Domain(format!("curvature {k} outside (-1, 0)")));
    }
    Ok(k / (k + 1.0))
}

/// K^d ↦ K^d/(1−K^d), the inverse of [`dual_curvature`].
pub fn dual_curvature_inverse(kd: f64) -> Result<f64> {
    if !(kd < 0.0) || !kd.is_finite() {
        return Err(Error::Domain(format!("dual curvature {kd} must be negative")));
    }
    Ok(kd / (1.0 - kd))
}

/// Principal curvature after flowing a distance `t` along the normal:
/// (λ + tanh t)/(1 + λ tanh t).
pub fn push_principal(lambda: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("push distance {t} must be non-negative")));
    }
    let th = t.tanh();
    let den = 1.0 + lambda * th;
    if den.abs() <= f64::EPSILON * (1.0 + lambda.abs()) {
        return Err(Error::SingularPush);
    }
    Ok((lambda + th) / den)
}

/// True when push(λ,t)·push(μ,t) strictly increases along the sorted `ts`.
pub fn push_product_increasing(lambda: f64, mu: f64, ts: &[f64]) -> Result<bool> {
    let mut prev = None;
    for &t in ts {
        let v = push_principal(lambda, t)? * push_principal(mu, t)?;
        if matches!(prev, Some(p) if v <= p) {
            return Ok(false);
        }
        prev = Some(v);
    }
    Ok(true)
}

/// Induced metric and shape operator of a surface on one side.
#[derive(Clone, Debug)]
pub struct EmbeddingData {
    pub metric: MetricField,
    pub shape: OperatorField,
    pub side: Side,
}

/// Post hoc audit of embedding data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub self_adjoint: f64,
    pub min_principal: f64,
    /// Finite-difference curvature against the side's Gauss identity.
    pub gauss: RefinementReport,
    pub codazzi: RefinementReport,
    pub pass: bool,
}

impl EmbeddingData {
    /// III = I(B·, B·).
    pub fn third(&self) -> Result<MetricField> {
        self.metric.pullback_by(&self.shape, "III")
    }

    /// −1 + det B on the hyperbolic side, 1 − det B on the de Sitter side.
    pub fn gauss_curvature_from_shape(&self) -> ScalarField {
        let side = self.side;
        self.shape.map("K", move |b| match side {
            Side::Hyperbolic => -1.0 + b.det(),
            Side::DeSitter => 1.0 - b.det(),
        })
    }

    fn gauss_residual(&self) -> Result<ScalarField> {
        let k = gauss_curvature(&self.metric)?;
        k.zip_map(&self.gauss_curvature_from_shape(), "gauss", |a, b| (a - b).abs())
    }

    /// Smallest real eigenvalue of B over all samples.
    pub fn min_principal(&self) -> f64 {
        self.shape.iter().map(|(_, _, b)| b.real_eigenvalues().1).fold(f64::INFINITY, f64::min)
    }

    pub fn audit(&self, tol: &Tolerances) -> Result<EmbeddingReport> {
        let self_adjoint = self
            .shape
            .iter()
            .map(|(k, i, b)| {
                let g = &self.metric.values[k][i];
                self_adjoint_residual(g, b) / (1.0 + g.max_abs() * b.max_abs())
            })
            .fold(0.0f64, f64::max);
        let coarse_atlas = Arc::new(self.metric.atlas.coarsen()?);
        let coarse = EmbeddingData {
            metric: self.metric.coarsen_onto(&coarse_atlas),
            shape: self.shape.coarsen_onto(&coarse_atlas),
            side: self.side,
        };
        let gauss = refinement_check(&self.gauss_residual()?, &coarse.gauss_residual()?, tol);
        let codazzi = codazzi_refinement(&self.metric, &self.shape, tol)?;
        let min_principal = self.min_principal();
        let pass = self_adjoint <= tol.pointwise && min_principal > 0.0 && gauss.pass && codazzi.pass;
        Ok(EmbeddingReport { self_adjoint, min_principal, gauss, codazzi, pass })
    }
}

fn require_normalized(h: &MetricField, h_prime: &MetricField, b: &OperatorField, tol: &Tolerances) -> Result<()> {
    let report = verify_normalized_pair(h, h_prime, b, tol)?;
    if report.all_pass() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.items.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        Err(Error::RejectedInput(format!("normalized pair check failed: {}", failed.join(", "))))
    }
}

/// Hyperbolic-side data I = h/|K|, B = √(1+K)·b of the K-surface attached to
/// a normalized pair.
pub fn phi_k_data(
    h: &MetricField,
    h_prime: &MetricField,
    b: &OperatorField,
    k: f64,
    tol: &Tolerances,
) -> Result<EmbeddingData> {
    dual_curvature(k)?;
    require_normalized(h, h_prime, b, tol)?;
    Ok(EmbeddingData {
        metric: h.scaled(1.0 / k.abs(), "I"),
        shape: b.map("B", |m| m.scale((1.0 + k).sqrt())),
        side: Side::Hyperbolic,
    })
}

/// De Sitter-side data I^d = h′/|K^d|, B^d = √(1−K^d)·b⁻¹.
pub fn psi_kd_data(
    h: &MetricField,
    h_prime: &MetricField,
    b: &OperatorField,
    kd: f64,
    tol: &Tolerances,
) -> Result<EmbeddingData> {
    dual_curvature_inverse(kd)?;
    require_normalized(h, h_prime, b, tol)?;
    let scale = (1.0 - kd).sqrt();
    let shape = b.try_zip_map(b, "B^d", |c, i, m, _| {
        m.inverse()
            .map(|inv| inv.scale(scale))
            .ok_or_else(|| Error::SingularMorphism { chart: b.chart_id(c).to_string(), index: i })
    })?;
    Ok(EmbeddingData { metric: h_prime.scaled(1.0 / kd.abs(), "I^d"), shape, side: Side::DeSitter })
}

/// (I, B) ↦ (III, B⁻¹), swapping the side. Hyperbolic input needs B positive
/// with det B < 1, de Sitter input needs B positive with det B > 1.
pub fn dualize_surface(e: &EmbeddingData) -> Result<EmbeddingData> {
    let side = e.side;
    let shape = e.shape.try_zip_map(&e.shape, "B^-1", |c, i, m, _| {
        let chart = e.shape.chart_id(c).to_string();
        let inv =
            m.inverse().filter(Mat2::is_finite).ok_or(Error::SingularMorphism { chart: chart.clone(), index: i })?;
        let (l1, l2) = m.real_eigenvalues();
        let det = m.det();
        let curved = match side {
            Side::Hyperbolic => det < 1.0,
            Side::DeSitter => det > 1.0,
        };
        if !(l2 > 0.0 && l1 >= l2) || !curved {
            return Err(Error::RejectedInput(format!(
                "shape operator on chart {chart} index {i} has eigenvalues ({l1}, {l2}), det {det}"
            )));
        }
        Ok(inv)
    })?;
    let metric = e.third()?;
    let other = match side {
        Side::Hyperbolic => Side::DeSitter,
        Side::DeSitter => Side::Hyperbolic,
    };
    Ok(EmbeddingData { metric: metric.with_role("I"), shape, side: other })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{ChartAtlas, Grid};
    use crate::linalg::Sym2;
    use std::f64::consts::PI;

    fn atlas() -> Arc<ChartAtlas> {
        Arc::new(ChartAtlas::single("cone", Grid::polar(1e-3, 1.5, 33, 16, PI / 2.0)).unwrap())
    }

    fn hyperbolic(a: &Arc<ChartAtlas>) -> MetricField {
        MetricField::from_fn(a, "h", |_, _, p| Sym2::new(1.0, 0.0, p[0].sinh().powi(2)))
    }

    #[test]
    fn dual_curvature_examples() {
        assert_eq!(dual_curvature(-0.5).unwrap(), -1.0);
        assert!((dual_curvature(-0.75).unwrap() + 3.0).abs() < 1e-15);
        assert!((dual_curvature_inverse(-3.0).unwrap() + 0.75).abs() < 1e-15);
        assert!(dual_curvature(-1e-12).unwrap() < 0.0);
        for bad in [-1.0, 0.0, 0.3, f64::NAN] {
            assert!(matches!(dual_curvature(bad), Err(Error::Domain(_))));
        }
        assert!(dual_curvature_inverse(0.0).is_err());
    }

    #[test]
    fn push_examples() {
        for t in [0.0, 0.3, 2.0, 10.0] {
            assert_eq!(push_principal(1.0, t).unwrap(), 1.0);
        }
        assert_eq!(push_principal(0.37, 0.0).unwrap(), 0.37);
        let t = 0.5f64.atanh();
        assert!((push_principal(0.5, t).unwrap() - 0.8).abs() < 1e-15);
        assert!(matches!(push_principal(-1.0, f64::INFINITY), Err(Error::SingularPush)));
        let ts: Vec<f64> = (0..50).map(|i| 0.1 * i as f64).collect();
        assert!(push_product_increasing(0.3, 0.6, &ts).unwrap());
    }

    #[test]
    fn phi_data_algebra() {
        let a = atlas();
        let h = hyperbolic(&a);
        let e = OperatorField::constant(&a, "b", Mat2::IDENTITY);
        let tol = Tolerances::default();
        let d = phi_k_data(&h, &h, &e, -0.5, &tol).unwrap();
        for (k, i, b) in d.shape.iter() {
            assert!((b.det() - 0.5).abs() < 1e-15);
            assert!((d.metric.values[k][i] - h.values[k][i].scale(2.0)).max_abs() < 1e-15);
        }
        let d = phi_k_data(&h, &h, &e, -0.75, &tol).unwrap();
        let third = d.third().unwrap();
        for (k, i, g) in third.iter() {
            assert!((*g - h.values[k][i].scale(1.0 / 3.0)).max_abs() < 1e-12 * g.max_abs());
        }
        assert!(d.audit(&tol).unwrap().pass);
        let bad = OperatorField::constant(&a, "b", Mat2::diag(2.0, 1.0));
        assert!(matches!(phi_k_data(&h, &h, &bad, -0.5, &tol), Err(Error::RejectedInput(_))));
    }

    #[test]
    fn psi_data_and_duality_triangle() {
        let a = atlas();
        let h = hyperbolic(&a);
        let e = OperatorField::constant(&a, "b", Mat2::IDENTITY);
        let tol = Tolerances::default();
        let d = psi_kd_data(&h, &h, &e, -1.0, &tol).unwrap();
        assert!(d.shape.iter().all(|(_, _, b)| (b.det() - 2.0).abs() < 1e-14));
        let d3 = psi_kd_data(&h, &h, &e, -3.0, &tol).unwrap();
        for (k, i, g) in d3.third().unwrap().iter() {
            assert!((*g - h.values[k][i].scale(4.0 / 3.0)).max_abs() < 1e-12 * g.max_abs());
        }
        for k in [-0.9, -0.5, -0.2] {
            let phi = phi_k_data(&h, &h, &e, k, &tol).unwrap();
            let lhs = dualize_surface(&phi).unwrap();
            let rhs = psi_kd_data(&h, &h, &e, dual_curvature(k).unwrap(), &tol).unwrap();
            assert_eq!(lhs.side, Side::DeSitter);
            for (c, i, g) in lhs.metric.iter() {
                assert!((*g - rhs.metric.values[c][i]).max_abs() < 1e-12 * g.max_abs());
                assert!((lhs.shape.values[c][i] - rhs.shape.values[c][i]).max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dualize_round_trip_and_rejections() {
        let a = atlas();
        let h = hyperbolic(&a);
        let r = 0.8f64;
        let leaf = EmbeddingData {
            metric: h.scaled(r.cosh().powi(2), "I"),
            shape: OperatorField::constant(&a, "B", Mat2::scalar(r.tanh())),
            side: Side::Hyperbolic,
        };
        let dual = dualize_surface(&leaf).unwrap();
        for (k, i, g) in dual.metric.iter() {
            assert!((*g - h.values[k][i].scale(r.sinh().powi(2))).max_abs() <= 1e-12 * g.max_abs());
            assert!((dual.shape.values[k][i] - Mat2::scalar(1.0 / r.tanh())).max_abs() < 1e-14);
        }
        let back = dualize_surface(&dual).unwrap();
        assert_eq!(back.side, Side::Hyperbolic);
        for (k, i, g) in back.metric.iter() {
            assert!((*g - leaf.metric.values[k][i]).max_abs() <= 1e-10 * g.max_abs());
        }
        let umbilic = EmbeddingData { shape: OperatorField::constant(&a, "B", Mat2::IDENTITY), ..leaf.clone() };
        assert!(matches!(dualize_surface(&umbilic), Err(Error::RejectedInput(_))));
        let singular = EmbeddingData { shape: OperatorField::constant(&a, "B", Mat2::diag(0.5, 0.0)), ..leaf };
        assert!(matches!(dualize_surface(&singular), Err(Error::SingularMorphism { .. })));
    }
}
