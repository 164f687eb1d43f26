//! Equidistant foliation of a hyperbolic end and of its dual de Sitter
//! spacetime, evaluated lazily from the data at infinity.

use crate::fields::{
    codazzi_refinement, gauss_curvature, refinement_check, ChartAtlas, Field, MetricField, OperatorField,
    RefinementReport, ScalarField,
};
use crate::infinity::{condition_star_report, InfinityData};
use crate::linalg::{self_adjoint_residual, Mat2, Sym2};
use crate::tol::Tolerances;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Hyperbolic,
    DeSitter,
}

impl Side {
    /// +1 for the hyperbolic end, −1 for the de Sitter side.
    pub fn sign(self) -> f64 {
        match self {
            Side::Hyperbolic => 1.0,
            Side::DeSitter => -1.0,
        }
    }
}

/// Parameter range of a family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FamilyOptions {
    /// Lower bound below which the threshold search does not look.
    pub search_floor: f64,
    /// Upper end of the parameter range; derived from sup|λ*| when absent.
    pub r_max: Option<f64>,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        FamilyOptions { search_floor: 0.0, r_max: None }
    }
}

/// Minimal principal curvature counted as positive.
pub const POSITIVITY_MARGIN: f64 = 1e-8;
const COARSE_POINTS: usize = 32;
const BISECTION_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct EndFamily {
    pub side: Side,
    pub datum: InfinityData,
    /// Convexity threshold; leaves at or above it have positive principal curvatures.
    pub start: f64,
    pub r_max: f64,
}

/// One leaf of the family: metric, shape operator and the second and third
/// fundamental forms.
#[derive(Clone, Debug)]
pub struct Leaf {
    pub param: f64,
    pub metric: MetricField,
    pub shape: OperatorField,
    pub second: MetricField,
    pub third: MetricField,
}

/// The two linear maps P = e^r E + s e^{−r} B*, Q = e^r E − s e^{−r} B*.
pub(crate) fn flow_maps(side: Side, param: f64, b: &Mat2) -> (Mat2, Mat2) {
    let (a, c) = (param.exp(), (-param).exp() * side.sign());
    (Mat2::scalar(a) + b.scale(c), Mat2::scalar(a) - b.scale(c))
}

/// Principal curvature of the leaf at `param` over an eigenvalue λ* of B*.
pub fn leaf_eigenvalue(side: Side, param: f64, lambda_star: f64) -> Option<f64> {
    let (a, c) = (param.exp(), (-param).exp() * side.sign() * lambda_star);
    let den = a + c;
    (den != 0.0).then(|| (a - c) / den)
}

/// Closed-form leaf curvature −2 tr B*/(e^{2r} + s tr B* + e^{−2r} det B*),
/// s = 1 on the hyperbolic side and −1 on the de Sitter side.
pub fn closed_form_curvature(side: Side, param: f64, b: &Mat2) -> f64 {
    let s = side.sign();
    let den = (2.0 * param).exp() + s * b.trace() + (-2.0 * param).exp() * b.det();
    -2.0 * b.trace() / den
}

impl EndFamily {
    pub fn side_curvature(&self, det_shape: f64) -> f64 {
        match self.side {
            Side::Hyperbolic => -1.0 + det_shape,
            Side::DeSitter => 1.0 - det_shape,
        }
    }

    /// Samples of the leaf at `param`.
    pub fn leaf(&self, param: f64) -> Result<Leaf> {
        let d = &self.datum;
        let atlas = d.istar.atlas.clone();
        let mut metric = d.istar.clone();
        let mut shape = d.bstar.clone();
        let mut second = d.istar.clone();
        let mut third = d.istar.clone();
        for (k, chart) in atlas.charts.iter().enumerate() {
            for s in 0..chart.grid.len() {
                let g = d.istar.values[k][s];
                let (p, q) = flow_maps(self.side, param, &d.bstar.values[k][s]);
                let pinv = p.inverse().filter(|m| m.is_finite()).ok_or_else(|| Error::SingularLeaf {
                    param,
                    chart: chart.id.clone(),
                    index: s,
                })?;
                metric.values[k][s] = g.pullback(&p).scale(0.5);
                second.values[k][s] = g.pair(&p, &q).scale(0.5);
                third.values[k][s] = g.pullback(&q).scale(0.5);
                shape.values[k][s] = pinv * q;
            }
        }
        Ok(Leaf {
            param,
            metric: metric.with_role("I_r"),
            shape: shape.with_role("B_r"),
            second: second.with_role("II_r"),
            third: third.with_role("III_r"),
        })
    }

    /// 3D metric dr² + I_r (hyperbolic) or −dt² + I^d_t (de Sitter) at a sample,
    /// as (normal coefficient, leaf metric).
    pub fn ambient_metric(&self, param: f64, chart: usize, index: usize) -> (f64, Sym2) {
        let g = self.datum.istar.values[chart][index];
        let (p, _) = flow_maps(self.side, param, &self.datum.bstar.values[chart][index]);
        (self.side.sign(), g.pullback(&p).scale(0.5))
    }
}

/// Ordered principal curvatures (λ ≥ μ) at `param` from the eigenvalues of B*.
pub fn eigenvalues_at(f: &EndFamily, param: f64) -> Result<(ScalarField, ScalarField)> {
    let b = &f.datum.bstar;
    let mut lam = b.map("lambda", |_| 0.0);
    let mut mu = b.map("mu", |_| 0.0);
    for (k, i, m) in b.iter() {
        let (l1, l2) = m.real_eigenvalues();
        let singular = || Error::SingularLeaf { param, chart: b.chart_id(k).to_string(), index: i };
        let a = leaf_eigenvalue(f.side, param, l1).ok_or_else(singular)?;
        let c = leaf_eigenvalue(f.side, param, l2).ok_or_else(singular)?;
        lam.values[k][i] = a.max(c);
        mu.values[k][i] = a.min(c);
    }
    Ok((lam, mu))
}

/// Every sample has P positive (e^{2r} > −s λ*) and both leaf curvatures ≥ margin.
fn convex_at(side: Side, param: f64, eigen: &[(f64, f64)]) -> bool {
    let s = side.sign();
    eigen.iter().all(|&(l1, l2)| {
        [l1, l2].iter().all(|&l| {
            let den = param.exp() + s * (-param).exp() * l;
            den > 0.0 && matches!(leaf_eigenvalue(side, param, l), Some(v) if v.is_finite() && v >= POSITIVITY_MARGIN)
        })
    })
}

fn search_threshold(side: Side, eigen: &[(f64, f64)], floor: f64, r_max: f64) -> f64 {
    let ok = |p: f64| convex_at(side, p, eigen);
    if ok(floor) {
        return floor;
    }
    // log-spaced in the distance from the floor
    let span = (r_max - floor).max(1e-12);
    let first = span * 1e-6;
    let mut lo = floor;
    let mut hi = None;
    for n in 1..COARSE_POINTS {
        let p = floor + first * (span / first).powf(n as f64 / (COARSE_POINTS - 1) as f64);
        if ok(p) {
            hi = Some(p);
            break;
        }
        lo = p;
    }
    let Some(mut hi) = hi else { return r_max };
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn eigen_list(d: &InfinityData) -> Vec<(f64, f64)> {
    d.bstar.iter().map(|(_, _, m)| m.real_eigenvalues()).collect()
}

/// Smallest parameter (to 1e−10) from which every leaf is strictly convex.
pub fn convexity_threshold(f: &EndFamily, floor: f64) -> f64 {
    search_threshold(f.side, &eigen_list(&f.datum), floor, f.r_max)
}

/// Checks Condition (★), then fixes the parameter range.
pub fn build_family(d: &InfinityData, side: Side, tol: &Tolerances, opts: &FamilyOptions) -> Result<EndFamily> {
    let report = condition_star_report(d, tol)?;
    if !report.all_pass() {
        return Err(Error::RejectedDatum(report.summary()));
    }
    let eigen = eigen_list(d);
    let sup = eigen.iter().fold(0.0f64, |m, e| m.max(e.0.abs()).max(e.1.abs()));
    let r_max = opts.r_max.unwrap_or_else(|| 10f64.max(0.5 * sup.max(1e-300).ln() + 5.0));
    if !(r_max > opts.search_floor) {
        return Err(Error::Domain(format!("empty parameter range [{}, {r_max}]", opts.search_floor)));
    }
    let start = search_threshold(side, &eigen, opts.search_floor, r_max);
    Ok(EndFamily { side, datum: d.clone(), start, r_max })
}

/// Rebuilds (I*, II*) from a single leaf:
/// I* = ½e^{−2r}(I_r + 2II_r + III_r) and II* = ±½(I_r − III_r).
pub fn recover_infinity_data(f: &EndFamily, param: f64) -> Result<InfinityData> {
    let leaf = f.leaf(param)?;
    let scale = 0.5 * (-2.0 * param).exp();
    let s = f.side.sign();
    let istar = leaf.metric.zip_map(&leaf.second, "I*", |i, ii| *i + ii.scale(2.0))?;
    let istar = istar.zip_map(&leaf.third, "I*", |a, iii| (*a + *iii).scale(scale))?;
    let iistar = leaf.metric.zip_map(&leaf.third, "II*", |i, iii| (*i - *iii).scale(0.5 * s))?;
    InfinityData::assemble(istar, iistar, f.datum.declared_curvature.clone())
}

/// Per-leaf Gauss/Codazzi audit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LeafReport {
    pub param: f64,
    pub self_adjoint: f64,
    /// max |K(det B_r) − closed form|.
    pub gauss_closed_form: f64,
    /// Finite-difference curvature against the Gauss side, under grid halving.
    pub gauss_fd: RefinementReport,
    pub codazzi: RefinementReport,
    pub pass: bool,
}

fn gauss_fd_residual(f: &EndFamily, leaf: &Leaf) -> Result<ScalarField> {
    let k = gauss_curvature(&leaf.metric)?;
    k.zip_map(&leaf.shape, "gauss_fd", |kf, b| (kf - f.side_curvature(b.det())).abs())
}

pub fn leaf_report(f: &EndFamily, param: f64, tol: &Tolerances) -> Result<LeafReport> {
    let leaf = f.leaf(param)?;
    let self_adjoint = leaf
        .shape
        .iter()
        .map(|(k, i, b)| {
            let g = &leaf.metric.values[k][i];
            self_adjoint_residual(g, b) / (1.0 + g.max_abs() * b.max_abs())
        })
        .fold(0.0f64, f64::max);
    let gauss_closed_form = leaf
        .shape
        .iter()
        .map(|(k, i, b)| {
            let bs = &f.datum.bstar.values[k][i];
            (f.side_curvature(b.det()) - closed_form_curvature(f.side, param, bs)).abs()
        })
        .fold(0.0f64, f64::max);

    let coarse_atlas = Arc::new(f.datum.istar.atlas.coarsen()?);
    let coarse = coarse_family(f, &coarse_atlas)?;
    let coarse_leaf = coarse.leaf(param)?;
    let gauss_fd = refinement_check(&gauss_fd_residual(f, &leaf)?, &gauss_fd_residual(&coarse, &coarse_leaf)?, tol);
    let codazzi = codazzi_refinement(&leaf.metric, &leaf.shape, tol)?;
    let pass = self_adjoint <= tol.pointwise && gauss_closed_form <= tol.closed_form && gauss_fd.pass && codazzi.pass;
    Ok(LeafReport { param, self_adjoint, gauss_closed_form, gauss_fd, codazzi, pass })
}

/// The same family on every-second-sample grids.
pub fn coarse_family(f: &EndFamily, coarse: &Arc<ChartAtlas>) -> Result<EndFamily> {
    let d = &f.datum;
    let datum = InfinityData::assemble(
        d.istar.coarsen_onto(coarse),
        d.iistar.coarsen_onto(coarse),
        d.declared_curvature.as_ref().map(|k| k.coarsen_onto(coarse)),
    )?;
    Ok(EndFamily { datum, ..f.clone() })
}

/// One row of the per-sample leaf dump.
#[derive(Clone, Debug, Serialize)]
pub struct LeafRow {
    pub chart_id: String,
    pub i: usize,
    pub j: usize,
    pub param: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub lambda: f64,
    pub mu: f64,
    #[serde(rename = "det_B")]
    pub det_b: f64,
    pub gauss_residual: f64,
}

/// Closed-form curvature, principal curvatures and the pointwise Gauss
/// residual at every sample.
pub fn leaf_rows(f: &EndFamily, param: f64) -> Result<Vec<LeafRow>> {
    let leaf = f.leaf(param)?;
    let (lam, mu) = eigenvalues_at(f, param)?;
    let atlas = &f.datum.istar.atlas;
    let mut rows = Vec::with_capacity(atlas.total_samples());
    for (k, s, b) in leaf.shape.iter() {
        let grid = &atlas.charts[k].grid;
        let (i, j) = grid.ij(s);
        let kc = closed_form_curvature(f.side, param, &f.datum.bstar.values[k][s]);
        rows.push(LeafRow {
            chart_id: atlas.charts[k].id.clone(),
            i,
            j,
            param,
            k: kc,
            lambda: lam.values[k][s],
            mu: mu.values[k][s],
            det_b: b.det(),
            gauss_residual: (f.side_curvature(b.det()) - kc).abs(),
        });
    }
    Ok(rows)
}

/// Scalar field of the closed-form leaf curvature.
pub fn curvature_field(f: &EndFamily, param: f64) -> ScalarField {
    let b = &f.datum.bstar;
    Field::from_fn(&b.atlas, "K_r", |k, i, _| closed_form_curvature(f.side, param, &b.values[k][i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Chart, Grid};
    use crate::infinity::{data_from_qd, QuadDiff};
    use num_complex::Complex64 as C;
    use std::f64::consts::PI;

    fn atlas() -> Arc<ChartAtlas> {
        let n = 33;
        let h = 1.0 / (n - 1) as f64;
        Arc::new(
            ChartAtlas::new(
                vec![
                    Chart { id: "disk".into(), grid: Grid::rect([-0.5, -0.5], [h, h], [n, n]) },
                    Chart { id: "cone".into(), grid: Grid::polar(1e-3, 1.5, 33, 16, PI / 2.0) },
                ],
                vec![],
            )
            .unwrap(),
        )
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

    fn fuchsian() -> InfinityData {
        let a = atlas();
        let d = data_from_qd(&hyperbolic(&a), &QuadDiff::zero(&a), &Tolerances::default()).unwrap();
        InfinityData { declared_curvature: Some(ScalarField::constant(&a, "K", -1.0)), ..d }
    }

    fn perturbed() -> InfinityData {
        let a = atlas();
        let q = QuadDiff::from_fn(&a, vec![1], |k, z| {
            if k == 0 {
                C::new(0.1, 0.05) * (C::new(0.6, 0.8) * z).exp()
            } else {
                C::new(0.05, -0.02) / z + 0.1
            }
        });
        let d = data_from_qd(&hyperbolic(&a), &q, &Tolerances::default()).unwrap();
        InfinityData { declared_curvature: Some(ScalarField::constant(&a, "K", -1.0)), ..d }
    }

    #[test]
    fn fuchsian_curvature_at_zero() {
        let f = build_family(&fuchsian(), Side::Hyperbolic, &Tolerances::default(), &FamilyOptions::default()).unwrap();
        assert_eq!(f.start, 0.0);
        let leaf = f.leaf(0.0).unwrap();
        for (_, _, b) in leaf.shape.iter() {
            assert!((b.det() - 1.0 / 9.0).abs() < 1e-14);
        }
        let k = curvature_field(&f, 0.0);
        assert!((k.max() + 8.0 / 9.0).abs() < 1e-15);
        let r = 0.7f64;
        let expect = -2.0 / (r.exp() + 0.5 * (-r).exp()).powi(2);
        assert!((curvature_field(&f, r).max() - expect).abs() < 1e-14);
    }

    #[test]
    fn de_sitter_eigenvalue_example() {
        assert!((leaf_eigenvalue(Side::DeSitter, 2f64.ln(), 0.5).unwrap() - 9.0 / 7.0).abs() < 1e-15);
        assert!((leaf_eigenvalue(Side::Hyperbolic, 2f64.ln(), 0.5).unwrap() - 7.0 / 9.0).abs() < 1e-15);
        assert_eq!(leaf_eigenvalue(Side::Hyperbolic, 0.3, 0.0), Some(1.0));
        assert_eq!(leaf_eigenvalue(Side::Hyperbolic, 0.0, 1.0), Some(0.0));
        assert_eq!(leaf_eigenvalue(Side::DeSitter, 0.0, 1.0), None);
    }

    #[test]
    fn gauss_identity_algebra() {
        let b = Mat2::new(0.7, 0.2, 0.1, 0.3);
        for side in [Side::Hyperbolic, Side::DeSitter] {
            for r in [0.1, 0.5, 2.0] {
                let (p, q) = flow_maps(side, r, &b);
                let det = (p.inverse().unwrap() * q).det();
                let k = match side {
                    Side::Hyperbolic => -1.0 + det,
                    Side::DeSitter => 1.0 - det,
                };
                assert!((k - closed_form_curvature(side, r, &b)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn leaves_audit_clean() {
        let tol = Tolerances::default();
        for d in [fuchsian(), perturbed()] {
            for side in [Side::Hyperbolic, Side::DeSitter] {
                let f = build_family(&d, side, &tol, &FamilyOptions::default()).unwrap();
                let rep = leaf_report(&f, f.start + 0.5, &tol).unwrap();
                assert!(rep.pass, "{side:?} {rep:?}");
            }
        }
    }

    #[test]
    fn recovery_is_parameter_independent() {
        let d = perturbed();
        for side in [Side::Hyperbolic, Side::DeSitter] {
            let f = build_family(&d, side, &Tolerances::default(), &FamilyOptions::default()).unwrap();
            for r in [0.5, 1.0, 2.0, 4.0] {
                let back = recover_infinity_data(&f, r).unwrap();
                for (k, i, g) in back.istar.iter() {
                    let (g0, s0) = (&d.istar.values[k][i], &d.iistar.values[k][i]);
                    assert!((*g - *g0).max_abs() <= 1e-9 * g0.max_abs());
                    assert!((back.iistar.values[k][i] - *s0).max_abs() <= 1e-9 * g0.max_abs());
                }
            }
        }
    }

    #[test]
    fn semigroup_law() {
        let d = perturbed();
        let f = build_family(&d, Side::Hyperbolic, &Tolerances::default(), &FamilyOptions::default()).unwrap();
        let (r, s) = (0.4, 0.9);
        let (lr, lrs) = (f.leaf(r).unwrap(), f.leaf(r + s).unwrap());
        for (k, i, b) in lr.shape.iter() {
            let m = Mat2::scalar(s.cosh()) + b.scale(s.sinh());
            let pushed = lr.metric.values[k][i].pullback(&m);
            let target = lrs.metric.values[k][i];
            assert!((pushed - target).max_abs() <= 1e-10 * target.max_abs());
        }
    }

    #[test]
    fn second_form_is_half_derivative() {
        let f =
            build_family(&perturbed(), Side::Hyperbolic, &Tolerances::default(), &FamilyOptions::default()).unwrap();
        let (r, dr) = (0.8, 1e-4);
        let (a, b, c) = (f.leaf(r - dr).unwrap(), f.leaf(r).unwrap(), f.leaf(r + dr).unwrap());
        for (k, i, ii) in b.second.iter() {
            let fd = (c.metric.values[k][i] - a.metric.values[k][i]).scale(0.25 / dr);
            assert!((fd - *ii).max_abs() <= 1e-6 * ii.max_abs());
        }
    }

    #[test]
    fn thresholds() {
        // B* with eigenvalues 4 and −3 (trace 1)
        let a = atlas();
        let istar = MetricField::constant(&a, "I*", Sym2::scalar(1.0));
        let iistar = MetricField::constant(&a, "II*", Sym2::new(4.0, 0.0, -3.0));
        let d = InfinityData::assemble(istar, iistar, None).unwrap();
        let eig = eigen_list(&d);
        let h = search_threshold(Side::Hyperbolic, &eig, 0.0, 10.0);
        // the 1e-8 positivity margin shifts the root by about 1e-8
        assert!((h - 2f64.ln()).abs() < 1e-7, "{h}");
        let ds = search_threshold(Side::DeSitter, &eig, 0.0, 10.0);
        assert!((ds - 2f64.ln()).abs() < 1e-7, "{ds}");
        assert!(convex_at(Side::Hyperbolic, h + 1e-6, &eig) && !convex_at(Side::Hyperbolic, h - 1e-6, &eig));
        let fuchs = eigen_list(&fuchsian());
        assert_eq!(search_threshold(Side::Hyperbolic, &fuchs, 0.0, 10.0), 0.0);
        let below = search_threshold(Side::Hyperbolic, &fuchs, -2.0, 10.0);
        assert!((below + 0.5 * 2f64.ln()).abs() < 1e-7);
    }

    #[test]
    fn rejected_datum() {
        let d = fuchsian();
        let bumped = d.istar.zip_map(&d.iistar, "II*", |g, s| *s + g.scale(0.1)).unwrap();
        let bad = InfinityData::assemble(d.istar.clone(), bumped, d.declared_curvature.clone()).unwrap();
        let err = build_family(&bad, Side::Hyperbolic, &Tolerances::default(), &FamilyOptions::default()).unwrap_err();
        assert!(matches!(err, Error::RejectedDatum(_)));
    }
}
