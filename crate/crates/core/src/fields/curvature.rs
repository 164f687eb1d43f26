use super::atlas::Grid;
use super::diff::{d01, d1, d2};
use super::field::{Field, MetricField, OperatorField, ScalarField};
use crate::linalg::{self_adjoint_residual, Mat2, Sym2};
use crate::tol::Tolerances;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Christoffel symbols Γᵏᵢⱼ indexed `[k][i][j]`.
pub type Gamma = [[[f64; 2]; 2]; 2];

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Pointwise Gauss curvature by the Brioschi formula with finite differences.
pub fn gauss_curvature(g: &MetricField) -> Result<ScalarField> {
    g.ensure_positive_definite()?;
    let values = (0..g.atlas.charts.len())
        .map(|k| brioschi(&g.atlas.charts[k].grid, &g.component(k, 0), &g.component(k, 1), &g.component(k, 2)))
        .collect();
    Ok(Field { role: format!("K[{}]", g.role), atlas: g.atlas.clone(), values })
}

/// Brioschi curvature on one chart from the metric components (xx, xy, yy).
pub fn brioschi(grid: &Grid, e: &[f64], f: &[f64], gg: &[f64]) -> Vec<f64> {
    let (eu, ev) = (d1(e, grid, 0), d1(e, grid, 1));
    let (fu, fv) = (d1(f, grid, 0), d1(f, grid, 1));
    let (gu, gv) = (d1(gg, grid, 0), d1(gg, grid, 1));
    let evv = d2(e, grid, 1);
    let guu = d2(gg, grid, 0);
    let fuv = d01(f, grid);
    (0..grid.len())
        .map(|i| {
            let (e, f, g) = (e[i], f[i], gg[i]);
            let m1 = [
                [-0.5 * evv[i] + fuv[i] - 0.5 * guu[i], 0.5 * eu[i], fu[i] - 0.5 * ev[i]],
                [fv[i] - 0.5 * gu[i], e, f],
                [0.5 * gv[i], f, g],
            ];
            let m2 = [[0.0, 0.5 * ev[i], 0.5 * gu[i]], [0.5 * ev[i], e, f], [0.5 * gu[i], f, g]];
            let w = e * g - f * f;
            (det3(m1) - det3(m2)) / (w * w)
        })
        .collect()
}

/// Curvature of h = g(A·, A·) as K_g / det A.
pub fn curvature_via_morphism(g: &MetricField, a: &OperatorField) -> Result<ScalarField> {
    g.check_atlas(a)?;
    let k = gauss_curvature(g)?;
    k.try_zip_map(a, "K", |c, i, kg, m| {
        let d = m.det();
        if d.abs() <= 1e-14 * m.max_abs().powi(2) || !d.is_finite() {
            Err(Error::SingularMorphism { chart: g.chart_id(c).to_string(), index: i })
        } else {
            Ok(kg / d)
        }
    })
}

fn metric_derivatives(g: &MetricField, k: usize) -> [[Vec<f64>; 3]; 2] {
    let grid = &g.atlas.charts[k].grid;
    let comps = [g.component(k, 0), g.component(k, 1), g.component(k, 2)];
    [
        [d1(&comps[0], grid, 0), d1(&comps[1], grid, 0), d1(&comps[2], grid, 0)],
        [d1(&comps[0], grid, 1), d1(&comps[1], grid, 1), d1(&comps[2], grid, 1)],
    ]
}

/// Christoffel symbols of chart `k` from finite differences of the metric.
pub fn christoffel(g: &MetricField, k: usize) -> Vec<Gamma> {
    let dg = metric_derivatives(g, k);
    // component index of g_ij in (xx, xy, yy)
    let c = |i: usize, j: usize| i + j;
    g.values[k]
        .iter()
        .enumerate()
        .map(|(s, m)| {
            let gi = m.to_mat().inverse().unwrap_or(Mat2::scalar(f64::NAN));
            let mut gam = [[[0.0; 2]; 2]; 2];
            for kk in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        let mut acc = 0.0;
                        for l in 0..2 {
                            acc += gi.0[kk][l] * (dg[i][c(j, l)][s] + dg[j][c(i, l)][s] - dg[l][c(i, j)][s]);
                        }
                        gam[kk][i][j] = 0.5 * acc;
                    }
                }
            }
            gam
        })
        .collect()
}

/// Pointwise norm of d^∇A, the TΣ-valued 2-form (∇ₓA)Y − (∇ᵧA)X, measured on a
/// g-orthonormal frame.
pub fn codazzi_residual(g: &MetricField, a: &OperatorField) -> Result<ScalarField> {
    g.check_atlas(a)?;
    g.ensure_positive_definite()?;
    let mut values = Vec::new();
    for (k, chart) in g.atlas.charts.iter().enumerate() {
        let grid = &chart.grid;
        let gam = christoffel(g, k);
        let comp = |r: usize, c: usize| -> Vec<f64> { a.values[k].iter().map(|m| m.0[r][c]).collect() };
        // ∂₀Aᵏ₁ and ∂₁Aᵏ₀
        let d0a1 = [d1(&comp(0, 1), grid, 0), d1(&comp(1, 1), grid, 0)];
        let d1a0 = [d1(&comp(0, 0), grid, 1), d1(&comp(1, 0), grid, 1)];
        let chart_k = (0..grid.len())
            .map(|s| {
                let am = &a.values[k][s].0;
                let mut v = [0.0; 2];
                for kk in 0..2 {
                    v[kk] = d0a1[kk][s] - d1a0[kk][s];
                    for l in 0..2 {
                        v[kk] += gam[s][kk][0][l] * am[l][1] - gam[s][kk][1][l] * am[l][0];
                    }
                }
                let m = &g.values[k][s];
                (m.quad(v).max(0.0)).sqrt() / m.det().sqrt()
            })
            .collect();
        values.push(chart_k);
    }
    Ok(Field { role: "codazzi".into(), atlas: g.atlas.clone(), values })
}

/// Components (∂₀u, ∂₁u).
pub fn differential(u: &ScalarField) -> Field<[f64; 2]> {
    let values = u
        .atlas
        .charts
        .iter()
        .zip(&u.values)
        .map(|(c, v)| {
            let a = d1(v, &c.grid, 0);
            let b = d1(v, &c.grid, 1);
            a.into_iter().zip(b).map(|(x, y)| [x, y]).collect()
        })
        .collect();
    Field { role: format!("d{}", u.role), atlas: u.atlas.clone(), values }
}

/// Covariant Hessian ∂ᵢ∂ⱼu − Γᵏᵢⱼ∂ₖu of `u` for the metric `g`.
pub fn hessian(g: &MetricField, u: &ScalarField) -> Result<MetricField> {
    g.check_atlas(u)?;
    let du = differential(u);
    let mut values = Vec::new();
    for (k, chart) in g.atlas.charts.iter().enumerate() {
        let grid = &chart.grid;
        let uxx = d2(&u.values[k], grid, 0);
        let uyy = d2(&u.values[k], grid, 1);
        let uxy = d01(&u.values[k], grid);
        let gam = christoffel(g, k);
        let chart_k = (0..grid.len())
            .map(|s| {
                let d = du.values[k][s];
                let corr = |i: usize, j: usize| gam[s][0][i][j] * d[0] + gam[s][1][i][j] * d[1];
                Sym2::new(uxx[s] - corr(0, 0), uxy[s] - corr(0, 1), uyy[s] - corr(1, 1))
            })
            .collect();
        values.push(chart_k);
    }
    Ok(Field { role: format!("Hess {}", u.role), atlas: g.atlas.clone(), values })
}

/// Laplace–Beltrami operator gⁱʲ Hessᵢⱼ u.
pub fn laplacian(g: &MetricField, u: &ScalarField) -> Result<ScalarField> {
    let h = hessian(g, u)?;
    g.zip_map(&h, "lap", |m, hs| {
        let gi = m.inverse().unwrap_or(Sym2::scalar(f64::NAN));
        gi.xx * hs.xx + 2.0 * gi.xy * hs.xy + gi.yy * hs.yy
    })
}

/// Ordered eigenvalues (λ ≥ μ) of a g-self-adjoint operator field.
pub fn eigenvalue_fields(g: &MetricField, a: &OperatorField, tol: f64) -> Result<(ScalarField, ScalarField)> {
    g.check_atlas(a)?;
    for (k, i, m) in a.iter() {
        let gm = &g.values[k][i];
        let res = self_adjoint_residual(gm, m);
        if res > tol * (1.0 + gm.max_abs() * m.max_abs()) {
            return Err(Error::NotSelfAdjoint { chart: g.chart_id(k).to_string(), index: i, residual: res });
        }
    }
    let lam = a.map("lambda", |m| m.real_eigenvalues().0);
    let mu = a.map("mu", |m| m.real_eigenvalues().1);
    Ok((lam, mu))
}

/// Outcome of comparing a residual at two resolutions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    /// Max of the fine residual over the samples shared with the coarse grid.
    pub fine_max: f64,
    pub coarse_max: f64,
    pub observed_order: f64,
    pub pass: bool,
}

/// Samples this close to a bounded edge are left out of refinement maxima.
pub const EDGE_MARGIN: usize = 2;

/// Compares residuals computed on a grid and on its every-second-sample
/// coarsening, away from the one-sided edge stencils; passes when the fine
/// residual is below the floor or decays at least at the configured order.
pub fn refinement_check(fine: &ScalarField, coarse: &ScalarField, tol: &Tolerances) -> RefinementReport {
    let mut fine_max = 0.0f64;
    let mut coarse_max = 0.0f64;
    for (k, (fc, cc)) in fine.atlas.charts.iter().zip(&coarse.atlas.charts).enumerate() {
        for idx in 0..cc.grid.len() {
            if cc.grid.near_edge(idx, EDGE_MARGIN) {
                continue;
            }
            let (i, j) = cc.grid.ij(idx);
            fine_max = fine_max.max(fine.values[k][fc.grid.index(2 * i, 2 * j)].abs());
            coarse_max = coarse_max.max(coarse.values[k][idx].abs());
        }
    }
    let observed_order = if fine_max == 0.0 { f64::INFINITY } else { (coarse_max / fine_max).log2() };
    let pass = fine_max.is_finite() && (fine_max <= tol.residual_floor || observed_order >= tol.refinement_order);
    RefinementReport { fine_max, coarse_max, observed_order, pass }
}

/// Codazzi residual of (g, A) checked under grid halving.
pub fn codazzi_refinement(g: &MetricField, a: &OperatorField, tol: &Tolerances) -> Result<RefinementReport> {
    let fine = codazzi_residual(g, a)?;
    let coarse_atlas = Arc::new(g.atlas.coarsen()?);
    let gc = g.coarsen_onto(&coarse_atlas);
    let ac = a.coarsen_onto(&coarse_atlas);
    let coarse = codazzi_residual(&gc, &ac)?;
    Ok(refinement_check(&fine, &coarse, tol))
}

/// ∫ dA of a metric; `weights` replaces the trapezoid cell measure when given.
pub fn area(g: &MetricField, weights: Option<&ScalarField>) -> Result<f64> {
    g.ensure_positive_definite()?;
    if let Some(w) = weights {
        g.check_atlas(w)?;
    }
    let mut total = 0.0;
    for (k, i, m) in g.iter() {
        let w = match weights {
            Some(w) => w.values[k][i],
            None => g.atlas.charts[k].grid.cell_measure(i),
        };
        total += w * m.det().sqrt();
    }
    Ok(total)
}

/// (r, max over the ring of |v|) for each ring of polar chart `k`.
pub fn ring_profile(v: &ScalarField, k: usize) -> Vec<(f64, f64)> {
    let grid = &v.atlas.charts[k].grid;
    let [nr, na] = grid.dims();
    (0..nr)
        .map(|i| {
            let r = grid.coord(grid.index(i, 0))[0];
            let m = (0..na).fold(0.0f64, |m, j| m.max(v.values[k][grid.index(i, j)].abs()));
            (r, m)
        })
        .collect()
}

/// Least-squares slope of ln v against ln r; `None` if some value vanishes.
pub fn ring_slope(profile: &[(f64, f64)]) -> Option<f64> {
    if profile.len() < 2 || profile.iter().any(|(r, v)| !(*v > 0.0) || !(*r > 0.0)) {
        return None;
    }
    let n = profile.len() as f64;
    let xs: Vec<f64> = profile.iter().map(|(r, _)| r.ln()).collect();
    let ys: Vec<f64> = profile.iter().map(|(_, v)| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::ChartAtlas;
    use std::f64::consts::PI;

    fn rect(n: usize, lo: f64, hi: f64) -> Arc<ChartAtlas> {
        let h = (hi - lo) / (n - 1) as f64;
        Arc::new(ChartAtlas::single("r", Grid::rect([lo, lo], [h, h], [n, n])).unwrap())
    }

    #[test]
    fn sphere_has_curvature_one() {
        let g = Grid::Rect {
            origin: [0.5, 0.0],
            spacing: [0.02, 2.0 * PI / 64.0],
            dims: [101, 64],
            period: [None, Some(2.0 * PI)],
        };
        let atlas = Arc::new(ChartAtlas::single("s", g).unwrap());
        let m = MetricField::from_fn(&atlas, "round", |_, _, p| Sym2::new(1.0, 0.0, p[0].sin().powi(2)));
        let k = gauss_curvature(&m).unwrap();
        assert!(k.iter().all(|(_, _, v)| (v - 1.0).abs() < 5e-3), "max dev {}", k.max() - 1.0);
    }

    #[test]
    fn conformally_flat_saddle_factor() {
        // exp(2(x² − y²)) has harmonic log-factor, so K vanishes; check second-order convergence
        let err = |n: usize| {
            let atlas = rect(n, -0.5, 0.5);
            let m =
                MetricField::from_fn(&atlas, "m", |_, _, p| Sym2::scalar((2.0 * (p[0] * p[0] - p[1] * p[1])).exp()));
            gauss_curvature(&m).unwrap().max_abs()
        };
        let (coarse, fine) = (err(51), err(101));
        assert!(fine < 5e-3, "{fine}");
        assert!((coarse / fine).log2() > 1.8, "{coarse} {fine}");
    }

    #[test]
    fn codazzi_of_scaled_identity_is_gradient_norm() {
        let atlas = rect(41, 0.0, 1.0);
        let g = MetricField::constant(&atlas, "e", Sym2::scalar(1.0));
        let a = OperatorField::from_fn(&atlas, "fE", |_, _, p| Mat2::scalar(p[0] * p[0] + 3.0 * p[1]));
        let r = codazzi_residual(&g, &a).unwrap();
        for (_, i, v) in r.iter() {
            let p = atlas.charts[0].grid.coord(i);
            assert!((v - (4.0 * p[0] * p[0] + 9.0).sqrt()).abs() < 1e-9);
        }
        let e = OperatorField::constant(&atlas, "E", Mat2::IDENTITY);
        let poinc = MetricField::from_fn(&atlas, "h", |_, _, p| {
            Sym2::scalar(4.0 / (1.0 - 0.25 * (p[0] * p[0] + p[1] * p[1])).powi(2))
        });
        assert_eq!(codazzi_residual(&poinc, &e).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn eigenvalues_in_orthonormal_frame() {
        let atlas = rect(7, 0.0, 1.0);
        let g = MetricField::constant(&atlas, "e", Sym2::scalar(1.0));
        let a = OperatorField::constant(&atlas, "A", Mat2::new(1.0, 0.3, 0.3, 1.0));
        let (l, m) = eigenvalue_fields(&g, &a, 1e-10).unwrap();
        assert!((l.max() - 1.3).abs() < 1e-15 && (m.min() - 0.7).abs() < 1e-15);
        let bad = OperatorField::constant(&atlas, "A", Mat2::new(1.0, 0.3, 0.0, 1.0));
        assert!(matches!(eigenvalue_fields(&g, &bad, 1e-10), Err(Error::NotSelfAdjoint { .. })));
    }

    #[test]
    fn singular_morphism_reported() {
        let atlas = rect(9, 0.0, 1.0);
        let g = MetricField::constant(&atlas, "e", Sym2::scalar(1.0));
        let a = OperatorField::constant(&atlas, "A", Mat2::diag(1.0, 0.0));
        assert!(matches!(curvature_via_morphism(&g, &a), Err(Error::SingularMorphism { .. })));
    }

    #[test]
    fn non_definite_metric_named() {
        let atlas = rect(9, 0.0, 1.0);
        let g = MetricField::from_fn(
            &atlas,
            "g",
            |_, i, _| {
                if i == 7 {
                    Sym2::new(1.0, 2.0, 1.0)
                } else {
                    Sym2::scalar(1.0)
                }
            },
        );
        match gauss_curvature(&g) {
            Err(Error::NotPositiveDefinite { chart, index }) => {
                assert_eq!((chart.as_str(), index), ("r", 7))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ring_slope_recovers_power() {
        let prof: Vec<(f64, f64)> = (1..6).map(|k| (0.1 / k as f64, 3.0 * (0.1 / k as f64).powi(2))).collect();
        assert!((ring_slope(&prof).unwrap() - 2.0).abs() < 1e-12);
        assert!(ring_slope(&[(0.1, 0.0), (0.2, 1.0)]).is_none());
    }
}
