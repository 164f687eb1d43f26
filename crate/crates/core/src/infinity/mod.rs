//! Quadratic differentials, the data at infinity (I*, II*) and Condition (★).

use crate::fields::diff::d1;
use crate::fields::io::FieldFile;
use crate::fields::{
    codazzi_refinement, differential, gauss_curvature, hessian, laplacian, refinement_check, CheckItem, ComplexField,
    Field, Grid, MetricField, OperatorField, RefinementReport, ScalarField,
};
use crate::linalg::{Mat2, Sym2};
use crate::tol::Tolerances;
use crate::{Error, Result};
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Role under which a declared curvature of I* travels with the datum.
pub const DECLARED_CURVATURE_ROLE: &str = "K_I*";

/// Innermost rings used by the pole-order fit.
const POLE_RINGS: usize = 6;

/// q = f(z) dz². On rect charts z = x + iy; on a cone chart of angle θ the
/// value is f in the uniformizing coordinate z = tanh(r/2)^κ e^{iκα}, κ = 2π/θ.
#[derive(Clone, Debug)]
pub struct QuadDiff {
    pub values: ComplexField,
    /// Declared pole order per cone chart, in atlas order.
    pub poles: Vec<u32>,
}

/// Exponent κ = 2π/θ of a polar chart.
pub fn cone_exponent(grid: &Grid) -> Option<f64> {
    match grid {
        Grid::Polar { period, .. } => Some(2.0 * PI / period),
        Grid::Rect { .. } => None,
    }
}

/// Uniformizing coordinate of a polar sample (r, α).
pub fn cone_coordinate(kappa: f64, p: [f64; 2]) -> C {
    C::from_polar((p[0] / 2.0).tanh().powf(kappa), kappa * p[1])
}

impl QuadDiff {
    /// Samples `f` in each chart's complex coordinate (uniformizing on cone charts).
    pub fn from_fn(atlas: &Arc<crate::fields::ChartAtlas>, poles: Vec<u32>, f: impl Fn(usize, C) -> C) -> Self {
        let values = ComplexField::from_fn(atlas, "q", |k, _, p| {
            let grid = &atlas.charts[k].grid;
            let z = match cone_exponent(grid) {
                Some(kappa) => cone_coordinate(kappa, p),
                None => C::new(p[0], p[1]),
            };
            f(k, z)
        });
        QuadDiff { values, poles }
    }

    pub fn zero(atlas: &Arc<crate::fields::ChartAtlas>) -> Self {
        let n = atlas.cone_charts().len();
        QuadDiff { values: ComplexField::constant(atlas, "q", C::new(0.0, 0.0)), poles: vec![0; n] }
    }

    pub fn read(file: &FieldFile, atlas: &Arc<crate::fields::ChartAtlas>, role: &str) -> Result<Self> {
        let values = file.get_complex(atlas, role)?;
        let poles = file.poles.clone().unwrap_or_else(|| vec![0; atlas.cone_charts().len()]);
        Ok(QuadDiff { values, poles })
    }

    pub fn write(&self, file: &mut FieldFile) {
        file.push_complex(&self.values);
        file.poles = Some(self.poles.clone());
    }

    /// ½ Re q as a symmetric form in chart coordinates (traceless for any
    /// metric conformal to the chart).
    pub fn half_real_part(&self) -> MetricField {
        let atlas = self.values.atlas.clone();
        MetricField::from_fn(&atlas, "II*0", |k, i, p| {
            let f = self.values.values[k][i];
            match cone_exponent(&atlas.charts[k].grid) {
                None => Sym2::new(0.5 * f.re, -0.5 * f.im, -0.5 * f.re),
                Some(kappa) => {
                    let z = cone_coordinate(kappa, p);
                    let c = f * kappa * kappa * z * z;
                    let s = p[0].sinh();
                    Sym2::new(0.5 * c.re / (s * s), -0.5 * c.im / s, -0.5 * c.re)
                }
            }
        })
    }

    /// Pole order per cone chart fitted from the decay of max|f||z|² on the
    /// innermost rings.
    pub fn measured_pole_orders(&self) -> Vec<u32> {
        let atlas = &self.values.atlas;
        atlas
            .cone_charts()
            .into_iter()
            .map(|k| {
                let grid = &atlas.charts[k].grid;
                let kappa = cone_exponent(grid).unwrap_or(1.0);
                let [nr, na] = grid.dims();
                let pts: Vec<(f64, f64)> = (0..nr.min(POLE_RINGS))
                    .map(|i| {
                        let r = grid.coord(grid.index(i, 0))[0];
                        let zabs = (r / 2.0).tanh().powf(kappa);
                        let m = (0..na).fold(0.0f64, |m, j| m.max(self.values.values[k][grid.index(i, j)].norm()));
                        (zabs, m * zabs * zabs)
                    })
                    .collect();
                if pts.iter().all(|p| p.1 == 0.0) {
                    return 0;
                }
                match log_slope(&pts) {
                    Some(s) => (2.0 - s).round().max(0.0) as u32,
                    None => 2,
                }
            })
            .collect()
    }

    /// Relative Cauchy–Riemann residual |∂ₓf + i∂ᵧf| on rect charts, scaled
    /// by the chart maximum of |∂ₓf| + |∂ᵧf|. Cone charts are covered by the
    /// pole-order fit instead and read zero here.
    pub fn cauchy_riemann_residual(&self) -> ScalarField {
        let atlas = self.values.atlas.clone();
        let mut values = Vec::new();
        for (k, chart) in atlas.charts.iter().enumerate() {
            let grid = &chart.grid;
            if grid.is_polar() {
                values.push(vec![0.0; grid.len()]);
                continue;
            }
            let re: Vec<f64> = self.values.values[k].iter().map(|z| z.re).collect();
            let im: Vec<f64> = self.values.values[k].iter().map(|z| z.im).collect();
            let (rx, ry, ix, iy) = (d1(&re, grid, 0), d1(&re, grid, 1), d1(&im, grid, 0), d1(&im, grid, 1));
            let mut scale = 0.0f64;
            let mut res: Vec<f64> = (0..grid.len())
                .map(|s| {
                    let fx = C::new(rx[s], ix[s]);
                    let fy = C::new(ry[s], iy[s]);
                    scale = scale.max(fx.norm() + fy.norm());
                    (fx + C::i() * fy).norm()
                })
                .collect();
            if scale > 0.0 {
                res.iter_mut().for_each(|r| *r /= scale);
            }
            values.push(res);
        }
        Field { role: "cauchy_riemann".into(), atlas, values }
    }

    /// Cauchy–Riemann residual under grid halving.
    pub fn holomorphy_check(&self, tol: &Tolerances) -> Result<RefinementReport> {
        let fine = self.cauchy_riemann_residual();
        let coarse_atlas = Arc::new(self.values.atlas.coarsen()?);
        let coarse = QuadDiff { values: self.values.coarsen_onto(&coarse_atlas), poles: self.poles.clone() };
        Ok(refinement_check(&fine, &coarse.cauchy_riemann_residual(), tol))
    }

    /// Rejects non-holomorphic samples and poles above the declared order.
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let cones = self.values.atlas.cone_charts();
        if self.poles.len() != cones.len() {
            return Err(Error::InvalidDifferential(format!(
                "{} pole orders declared for {} cone charts",
                self.poles.len(),
                cones.len()
            )));
        }
        if let Some(p) = self.poles.iter().find(|p| **p > 1) {
            return Err(Error::InvalidDifferential(format!("declared pole order {p} exceeds 1")));
        }
        if self.values.values.iter().flatten().any(|z| !z.is_finite()) {
            return Err(Error::InvalidDifferential("non-finite sample".into()));
        }
        for ((k, declared), measured) in cones.iter().zip(&self.poles).zip(self.measured_pole_orders()) {
            if measured > *declared {
                return Err(Error::InvalidDifferential(format!(
                    "pole of order {measured} at cone chart {} (declared {declared})",
                    self.values.chart_id(*k)
                )));
            }
        }
        let cr = self.holomorphy_check(tol)?;
        if !cr.pass {
            return Err(Error::InvalidDifferential(format!(
                "Cauchy-Riemann residual does not decay (fine {:.3e}, coarse {:.3e})",
                cr.fine_max, cr.coarse_max
            )));
        }
        Ok(())
    }
}

/// Least-squares slope of log y against log x, skipping non-positive entries.
fn log_slope(pts: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = pts.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).map(|p| (p.0.ln(), p.1.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// The data at infinity of an end.
#[derive(Clone, Debug)]
pub struct InfinityData {
    pub istar: MetricField,
    pub iistar: MetricField,
    /// (I*)⁻¹ II*.
    pub bstar: OperatorField,
    /// Curvature of I* when known in closed form.
    pub declared_curvature: Option<ScalarField>,
}

impl InfinityData {
    pub fn assemble(istar: MetricField, iistar: MetricField, declared_curvature: Option<ScalarField>) -> Result<Self> {
        istar.check_atlas(&iistar)?;
        if let Some(k) = &declared_curvature {
            istar.check_atlas(k)?;
        }
        istar.ensure_positive_definite()?;
        let bstar = istar.try_zip_map(&iistar, "B*", |k, i, g, s| {
            let gi =
                g.inverse().ok_or_else(|| Error::NotPositiveDefinite { chart: istar.chart_id(k).into(), index: i })?;
            Ok(gi.to_mat() * s.to_mat())
        })?;
        Ok(InfinityData { istar, iistar: iistar.with_role("II*"), bstar, declared_curvature })
    }

    /// III* = I*(B*·, B*·).
    pub fn third_form(&self) -> MetricField {
        self.istar.zip_map(&self.bstar, "III*", |g, b| g.pullback(b)).expect("same atlas")
    }

    pub fn trace_field(&self) -> ScalarField {
        self.bstar.map("tr B*", |b| b.trace())
    }

    pub fn det_field(&self) -> ScalarField {
        self.bstar.map("det B*", |b| b.det())
    }

    /// Curvature of I*, declared or by finite differences.
    pub fn curvature(&self) -> Result<ScalarField> {
        match &self.declared_curvature {
            Some(k) => Ok(k.clone()),
            None => gauss_curvature(&self.istar),
        }
    }

    /// (cone chart id, innermost max|B* − ½E|, outermost-of-fit value) per cone chart.
    pub fn cone_limit_profile(&self) -> Vec<(String, Vec<(f64, f64)>)> {
        let dev = self.bstar.map("dev", |b| (*b - Mat2::scalar(0.5)).max_abs());
        self.istar
            .atlas
            .cone_charts()
            .into_iter()
            .map(|k| (self.istar.chart_id(k).to_string(), crate::fields::ring_profile(&dev, k)))
            .collect()
    }

    /// Writes I*, II* and a declared curvature (if any).
    pub fn write(&self, file: &mut FieldFile) {
        file.push(&self.istar.clone().with_role("I*"));
        file.push(&self.iistar);
        if let Some(k) = &self.declared_curvature {
            file.push(&k.clone().with_role(DECLARED_CURVATURE_ROLE));
        }
    }
}

/// II* = ½I* + ½Re q.
pub fn data_from_qd(istar: &MetricField, q: &QuadDiff, tol: &Tolerances) -> Result<InfinityData> {
    istar.check_atlas(&q.values)?;
    q.validate(tol)?;
    let iistar = istar.zip_map(&q.half_real_part(), "II*", |g, r| g.scale(0.5) + *r)?;
    InfinityData::assemble(istar.clone().with_role("I*"), iistar, None)
}

/// Three-item Condition (★) report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StarReport {
    pub items: Vec<CheckItem>,
    pub codazzi: RefinementReport,
    /// max |tr B* + K_{I*}|.
    pub trace_residual: f64,
    /// Present when the trace item was decided by grid halving.
    pub trace_refinement: Option<RefinementReport>,
    pub det_sup: f64,
}

impl StarReport {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }

    pub fn summary(&self) -> String {
        self.items
            .iter()
            .map(|i| format!("{}={}", i.name, if i.pass { "pass" } else { "fail" }))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

fn trace_residual_field(d: &InfinityData, k: &ScalarField) -> ScalarField {
    d.bstar.zip_map(k, "trace_residual", |b, kk| (b.trace() + kk).abs()).expect("same atlas")
}

pub fn condition_star_report(d: &InfinityData, tol: &Tolerances) -> Result<StarReport> {
    let codazzi = codazzi_refinement(&d.istar, &d.bstar, tol)?;
    let item1 = CheckItem::new(
        "codazzi",
        codazzi.pass,
        codazzi.fine_max,
        format!(
            "fine {:.3e}, coarse {:.3e}, order {:.2}",
            codazzi.fine_max, codazzi.coarse_max, codazzi.observed_order
        ),
    );

    let (trace_residual, trace_refinement, item2) = match &d.declared_curvature {
        Some(k) => {
            let r = trace_residual_field(d, k).max_abs();
            let pass = r <= tol.trace_identity;
            (r, None, CheckItem::new("trace_identity", pass, r, "max |tr B* + K| against declared curvature"))
        }
        None => {
            let fine = trace_residual_field(d, &gauss_curvature(&d.istar)?);
            let coarse_atlas = Arc::new(d.istar.atlas.coarsen()?);
            let coarse_d = InfinityData::assemble(
                d.istar.coarsen_onto(&coarse_atlas),
                d.iistar.coarsen_onto(&coarse_atlas),
                None,
            )?;
            let coarse = trace_residual_field(&coarse_d, &gauss_curvature(&coarse_d.istar)?);
            let rep = refinement_check(&fine, &coarse, tol);
            let r = rep.fine_max;
            let detail = format!("finite-difference curvature, order {:.2}", rep.observed_order);
            (r, Some(rep.clone()), CheckItem::new("trace_identity", rep.pass || r <= tol.trace_identity, r, detail))
        }
    };

    let det_sup = d.det_field().max_abs();
    let item3 = CheckItem::new(
        "det_bounded",
        det_sup.is_finite() && det_sup <= tol.det_bound,
        det_sup,
        format!("sup |det B*| against bound {:e}", tol.det_bound),
    );
    Ok(StarReport { items: vec![item1, item2, item3], codazzi, trace_residual, trace_refinement, det_sup })
}

/// Conformal change I₂* = e^{2u}I₁*, II₂* = II₁* + Hess u − du⊗du + ½|du|²I₁*.
pub fn gauge_transform(d: &InfinityData, u: &ScalarField) -> Result<InfinityData> {
    d.istar.check_atlas(u)?;
    if !u.all_finite() {
        return Err(Error::Domain("gauge function has non-finite samples".into()));
    }
    let hess = hessian(&d.istar, u)?;
    let du = differential(u);
    let mut iistar = d.iistar.clone();
    let mut istar = d.istar.clone();
    for (k, chart) in d.istar.atlas.charts.iter().enumerate() {
        for s in 0..chart.grid.len() {
            let g = d.istar.values[k][s];
            let [a, b] = du.values[k][s];
            let gi = g.inverse().ok_or_else(|| Error::NotPositiveDefinite { chart: chart.id.clone(), index: s })?;
            let norm2 = gi.quad([a, b]);
            iistar.values[k][s] =
                d.iistar.values[k][s] + hess.values[k][s] - Sym2::new(a * a, a * b, b * b) + g.scale(0.5 * norm2);
            istar.values[k][s] = g.scale((2.0 * u.values[k][s]).exp());
        }
    }
    let declared = match &d.declared_curvature {
        Some(k1) => {
            let lap = laplacian(&d.istar, u)?;
            let mut k2 = k1.clone();
            for (k, chart) in d.istar.atlas.charts.iter().enumerate() {
                for s in 0..chart.grid.len() {
                    k2.values[k][s] = (-2.0 * u.values[k][s]).exp() * (k1.values[k][s] - lap.values[k][s]);
                }
            }
            Some(k2)
        }
        None => None,
    };
    InfinityData::assemble(istar, iistar, declared)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Chart, ChartAtlas};

    fn disk_atlas(n: usize, cone: Option<(f64, usize)>) -> Arc<ChartAtlas> {
        let h = 1.0 / (n - 1) as f64;
        let mut charts = vec![Chart { id: "disk".into(), grid: Grid::rect([-0.5, -0.5], [h, h], [n, n]) }];
        if let Some((theta, nr)) = cone {
            charts.push(Chart { id: "cone".into(), grid: Grid::polar(1e-3, 1.0, nr, 32, theta) });
        }
        Arc::new(ChartAtlas::new(charts, vec![]).unwrap())
    }

    fn hyperbolic(atlas: &Arc<ChartAtlas>) -> MetricField {
        MetricField::from_fn(atlas, "I*", |k, _, p| {
            if atlas.charts[k].grid.is_polar() {
                Sym2::new(1.0, 0.0, p[0].sinh().powi(2))
            } else {
                Sym2::scalar(4.0 / (1.0 - p[0] * p[0] - p[1] * p[1]).powi(2))
            }
        })
    }

    #[test]
    fn fuchsian_datum() {
        let atlas = disk_atlas(33, Some((PI / 2.0, 33)));
        let d = data_from_qd(&hyperbolic(&atlas), &QuadDiff::zero(&atlas), &Tolerances::default()).unwrap();
        for (_, _, b) in d.bstar.iter() {
            assert!((*b - Mat2::scalar(0.5)).max_abs() < 1e-15);
            assert!((b.det() - 0.25).abs() < 1e-15);
        }
        let with_k = InfinityData { declared_curvature: Some(ScalarField::constant(&atlas, "K", -1.0)), ..d };
        let rep = condition_star_report(&with_k, &Tolerances::default()).unwrap();
        assert!(rep.all_pass(), "{rep:?}");
        assert!(rep.trace_residual <= 1e-8);
    }

    #[test]
    fn flat_chart_example() {
        let atlas = disk_atlas(17, None);
        let istar = MetricField::constant(&atlas, "I*", Sym2::scalar(2.0));
        let q = QuadDiff::from_fn(&atlas, vec![], |_, _| C::new(1.0, 0.0));
        let d = data_from_qd(&istar, &q, &Tolerances::default()).unwrap();
        for (_, _, b) in d.bstar.iter() {
            assert!((*b - Mat2::diag(0.75, 0.25)).max_abs() < 1e-15);
        }
    }

    #[test]
    fn trace_is_one_for_any_q() {
        let atlas = disk_atlas(17, Some((PI / 3.0, 17)));
        let q =
            QuadDiff::from_fn(&atlas, vec![1], |k, z| if k == 0 { C::new(0.3, 0.1) * z * z + 0.2 } else { 0.4 / z });
        let d = data_from_qd(&hyperbolic(&atlas), &q, &Tolerances::default()).unwrap();
        assert!(d.trace_field().iter().all(|(_, _, t)| (t - 1.0).abs() <= 1e-10));
    }

    #[test]
    fn simple_pole_tends_to_half_identity() {
        let atlas = disk_atlas(17, Some((PI / 2.0, 41)));
        let q = QuadDiff::from_fn(&atlas, vec![1], |k, z| if k == 1 { 1.0 / z } else { C::new(0.0, 0.0) });
        assert_eq!(q.measured_pole_orders(), vec![1]);
        let d = data_from_qd(&hyperbolic(&atlas), &q, &Tolerances::default()).unwrap();
        let (_, prof) = &d.cone_limit_profile()[0];
        let slope = crate::fields::ring_slope(&prof[..8]).unwrap();
        assert!(slope > 0.5, "{slope}");
        assert!(prof[0].1 < prof[7].1);
        let (lam, mu) = crate::fields::eigenvalue_fields(&d.istar, &d.bstar, 1e-9).unwrap();
        let inner = atlas.charts[1].grid.index(0, 3);
        assert!((lam.values[1][inner] - 0.5).abs() < 1e-6 && (mu.values[1][inner] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn double_pole_rejected() {
        let atlas = disk_atlas(17, Some((PI / 2.0, 33)));
        let q = QuadDiff::from_fn(&atlas, vec![1], |k, z| if k == 1 { 1.0 / (z * z) } else { z });
        let err = data_from_qd(&hyperbolic(&atlas), &q, &Tolerances::default()).unwrap_err();
        assert!(matches!(err, Error::InvalidDifferential(_)), "{err}");
        let undeclared = QuadDiff::from_fn(&atlas, vec![0], |k, z| if k == 1 { 1.0 / z } else { z });
        assert!(data_from_qd(&hyperbolic(&atlas), &undeclared, &Tolerances::default()).is_err());
    }

    #[test]
    fn antiholomorphic_rejected() {
        let atlas = disk_atlas(33, None);
        let q = QuadDiff::from_fn(&atlas, vec![], |_, z| z.conj());
        assert!(matches!(
            data_from_qd(&hyperbolic(&atlas), &q, &Tolerances::default()),
            Err(Error::InvalidDifferential(_))
        ));
    }

    #[test]
    fn perturbed_trace_fails() {
        let atlas = disk_atlas(33, Some((PI / 2.0, 33)));
        let d = data_from_qd(&hyperbolic(&atlas), &QuadDiff::zero(&atlas), &Tolerances::default()).unwrap();
        let bumped = d.istar.zip_map(&d.iistar, "II*", |g, s| *s + g.scale(0.1)).unwrap();
        let k = ScalarField::constant(&atlas, "K", -1.0);
        let pd = InfinityData::assemble(d.istar.clone(), bumped, Some(k)).unwrap();
        let rep = condition_star_report(&pd, &Tolerances::default()).unwrap();
        assert!(!rep.items[1].pass);
        assert!((rep.trace_residual - 0.2).abs() < 1e-12);
        // same failure under finite-difference curvature
        let fd = InfinityData { declared_curvature: None, ..pd };
        let rep = condition_star_report(&fd, &Tolerances::default()).unwrap();
        assert!(!rep.items[1].pass, "{rep:?}");
    }

    #[test]
    fn constant_gauge() {
        let atlas = disk_atlas(17, Some((PI / 2.0, 17)));
        let d = data_from_qd(&hyperbolic(&atlas), &QuadDiff::zero(&atlas), &Tolerances::default()).unwrap();
        let d = InfinityData { declared_curvature: Some(ScalarField::constant(&atlas, "K", -1.0)), ..d };
        let zero = gauge_transform(&d, &ScalarField::constant(&atlas, "u", 0.0)).unwrap();
        assert_eq!(zero.istar.values, d.istar.values);
        assert_eq!(zero.iistar.values, d.iistar.values);
        let c = gauge_transform(&d, &ScalarField::constant(&atlas, "u", 0.3)).unwrap();
        for (k, i, g) in c.istar.iter() {
            assert!((*g - d.istar.values[k][i].scale(0.6f64.exp())).max_abs() <= 1e-12 * g.max_abs());
            assert!((c.iistar.values[k][i] - d.iistar.values[k][i]).max_abs() == 0.0);
        }
        assert!(condition_star_report(&c, &Tolerances::default()).unwrap().all_pass());
    }

    #[test]
    fn smooth_gauge_keeps_condition_star() {
        let atlas = disk_atlas(101, None);
        let q = QuadDiff::from_fn(&atlas, vec![], |_, z| C::new(0.2, 0.1) * (C::new(0.8, 0.6) * z).exp());
        let d = data_from_qd(&hyperbolic(&atlas), &q, &Tolerances::default()).unwrap();
        let before = condition_star_report(&d, &Tolerances::default()).unwrap();
        let u = ScalarField::from_fn(&atlas, "u", |_, _, p| 0.1 * p[0].sin());
        let after = condition_star_report(&gauge_transform(&d, &u).unwrap(), &Tolerances::default()).unwrap();
        assert!(before.all_pass() && after.all_pass(), "{before:?}\n{after:?}");
        assert!(after.trace_residual <= 10.0 * before.trace_residual);
        assert!(after.codazzi.fine_max <= 10.0 * before.codazzi.fine_max);
        let back = gauge_transform(&gauge_transform(&d, &u).unwrap(), &u.map("-u", |v| -v)).unwrap();
        let dev = back.iistar.zip_map(&d.iistar, "dev", |a, b| (*a - *b).max_abs()).unwrap();
        assert!(dev.max_abs() < 1e-6, "{}", dev.max_abs());
    }
}
