use super::curvature::{codazzi_refinement, ring_profile, ring_slope};
use super::field::{MetricField, OperatorField, ScalarField};
use crate::linalg::self_adjoint_residual;
use crate::tol::Tolerances;
use crate::Result;
use serde::{Deserialize, Serialize};

/// One pass/fail line of a verification report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckItem {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub detail: String,
}

impl CheckItem {
    pub fn new(name: &str, pass: bool, value: f64, detail: impl Into<String>) -> Self {
        CheckItem { name: name.to_string(), pass, value, detail: detail.into() }
    }
}

/// The five items of the normalized-pair verifier, in order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizedPairReport {
    pub items: Vec<CheckItem>,
}

impl NormalizedPairReport {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }

    pub fn item(&self, n: usize) -> &CheckItem {
        &self.items[n]
    }
}

/// Deviation floor under which eigenvalues count as equal to one on every ring.
const RING_FLOOR: f64 = 1e-6;
/// Minimal log-log decay rate of the ring deviation toward the cone point.
const RING_MIN_SLOPE: f64 = 0.25;
/// Rings used by the trend fit.
const TREND_RINGS: usize = 8;

/// Checks that (h, h′) is related by a self-adjoint, unimodular Codazzi
/// morphism b with h′ = h(b·, b·) and b → E at the cone points.
pub fn verify_normalized_pair(
    h: &MetricField,
    h_prime: &MetricField,
    b: &OperatorField,
    tol: &Tolerances,
) -> Result<NormalizedPairReport> {
    h.check_atlas(h_prime)?;
    h.check_atlas(b)?;
    h.ensure_positive_definite()?;
    h_prime.ensure_positive_definite()?;

    let sa = b.iter().fold(0.0f64, |m, (k, i, bm)| {
        let g = &h.values[k][i];
        m.max(self_adjoint_residual(g, bm) / (1.0 + g.max_abs() * bm.max_abs()))
    });
    let item1 = CheckItem::new("self_adjoint", sa <= tol.pointwise, sa, "max |h·b − (h·b)ᵀ| (relative)");

    let det_dev = b.iter().fold(0.0f64, |m, (_, _, bm)| m.max((bm.det() - 1.0).abs()));
    let item2 = CheckItem::new("unit_determinant", det_dev <= tol.pointwise, det_dev, "max |det b − 1|");

    let cod = codazzi_refinement(h, b, tol)?;
    let item3 = CheckItem::new(
        "codazzi",
        cod.pass,
        cod.fine_max,
        format!("fine {:.3e}, coarse {:.3e}, order {:.2}", cod.fine_max, cod.coarse_max, cod.observed_order),
    );

    let pb_dev = b.iter().fold(0.0f64, |m, (k, i, bm)| {
        let lhs = h.values[k][i].pullback(bm);
        let rhs = &h_prime.values[k][i];
        m.max((lhs - *rhs).max_abs() / (1.0 + rhs.max_abs()))
    });
    let item4 = CheckItem::new("pullback", pb_dev <= tol.pointwise, pb_dev, "max |h(b·,b·) − h′| (relative)");

    let dev: ScalarField = b.map("eigen_dev", |m| {
        let (l, u) = m.real_eigenvalues();
        (l - 1.0).abs().max((u - 1.0).abs())
    });
    let mut pass5 = true;
    let mut worst = 0.0f64;
    let mut detail = String::new();
    let cones = h.atlas.cone_charts();
    if cones.is_empty() {
        detail.push_str("no cone charts");
    }
    for k in cones {
        let prof: Vec<(f64, f64)> = ring_profile(&dev, k).into_iter().take(TREND_RINGS).collect();
        let inner = prof[0].1;
        worst = worst.max(inner);
        let flat = prof.iter().all(|(_, v)| *v <= RING_FLOOR);
        let slope = ring_slope(&prof);
        let decays = matches!(slope, Some(s) if s >= RING_MIN_SLOPE) && inner <= prof[prof.len() - 1].1;
        let ok = flat || decays;
        pass5 &= ok;
        detail.push_str(&format!(
            "{}: inner deviation {:.3e}, slope {} ; ",
            h.chart_id(k),
            inner,
            slope.map_or("n/a".to_string(), |s| format!("{s:.3}"))
        ));
    }
    let item5 = CheckItem::new("cone_trend", pass5, worst, detail.trim_end_matches(" ; ").to_string());

    Ok(NormalizedPairReport { items: vec![item1, item2, item3, item4, item5] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Chart, ChartAtlas, Grid};
    use crate::linalg::{Mat2, Sym2};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn flat_polar_atlas() -> Arc<ChartAtlas> {
        Arc::new(
            ChartAtlas::new(
                vec![
                    Chart { id: "plane".into(), grid: Grid::rect([-1.0, -1.0], [0.05, 0.05], [41, 41]) },
                    Chart { id: "cone".into(), grid: Grid::polar(1e-3, 0.5, 33, 32, 2.0 * PI) },
                ],
                vec![],
            )
            .unwrap(),
        )
    }

    #[test]
    fn constant_stretch_fails_only_trend() {
        let atlas = flat_polar_atlas();
        let h = MetricField::from_fn(&atlas, "h", |k, _, p| {
            if k == 0 {
                Sym2::scalar(1.0)
            } else {
                Sym2::new(1.0, 0.0, p[0] * p[0])
            }
        });
        // diag(2, 1/2) in Cartesian components, rewritten in polar components
        let bc = Mat2::diag(2.0, 0.5);
        let b = OperatorField::from_fn(&atlas, "b", |k, _, p| {
            if k == 0 {
                bc
            } else {
                let (r, a) = (p[0], p[1]);
                let j = Mat2::new(a.cos(), -r * a.sin(), a.sin(), r * a.cos());
                j.inverse().unwrap() * bc * j
            }
        });
        let hp = h.pullback_by(&b, "h'").unwrap();
        let rep = verify_normalized_pair(&h, &hp, &b, &Tolerances::default()).unwrap();
        let passes: Vec<bool> = rep.items.iter().map(|i| i.pass).collect();
        assert_eq!(passes, vec![true, true, true, true, false], "{rep:#?}");
    }

    #[test]
    fn determinant_perturbation_reported() {
        let atlas = flat_polar_atlas();
        let h = MetricField::from_fn(&atlas, "h", |k, _, p| {
            if k == 0 {
                Sym2::scalar(1.0)
            } else {
                Sym2::new(1.0, 0.0, p[0] * p[0])
            }
        });
        let b = OperatorField::constant(&atlas, "b", Mat2::scalar(1.01f64.sqrt()));
        let hp = h.pullback_by(&b, "h'").unwrap();
        let rep = verify_normalized_pair(&h, &hp, &b, &Tolerances::default()).unwrap();
        assert!(!rep.item(1).pass);
        assert!((rep.item(1).value - 0.01).abs() < 1e-12);
    }
}
