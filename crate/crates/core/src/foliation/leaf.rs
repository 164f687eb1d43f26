//! Constant-curvature leaves as graphs r(x) over an equidistant family.

use super::{dual_curvature, dual_curvature_inverse, EmbeddingData};
use crate::family::{closed_form_curvature, flow_maps, EndFamily, Side};
use crate::fields::diff::{d01, d1, d2};
use crate::fields::{
    area, brioschi, gauss_bonnet_area, Axis, ConeSignature, Field, Grid, MetricField, OperatorField, ScalarField,
    EDGE_MARGIN,
};
use crate::linalg::{raise, Mat2, Sym2};
use crate::tol::Tolerances;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Relative area mismatch against Gauss–Bonnet accepted by a sweep.
pub const AREA_TOLERANCE: f64 = 0.01;
/// Same-colored unknowns are at least this far apart along a bounded axis;
/// one residual row depends on unknowns at most 6 samples away.
const COLOR_SPACING: usize = 13;
const FD_STEP: f64 = 1e-7;
/// Newton keeps iterating until the residual is this fraction of the target.
const STOP_FRACTION: f64 = 1e-3;
const HOMOGENEOUS_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    ClosedForm,
    Newton,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    pub max_iter: usize,
    /// Backtracking halvings per Newton step.
    pub max_halvings: usize,
    /// Amplitude of a bump added to the pointwise closed-form graph to form
    /// the initial guess; 0 starts from the pointwise graph itself.
    pub initial_offset: f64,
    /// Use Newton even when the datum is homogeneous.
    pub force_newton: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_iter: 50, max_halvings: 8, initial_offset: 0.0, force_newton: false }
    }
}

/// Newton diagnostics of one chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartSolve {
    pub chart: String,
    pub unknowns: usize,
    /// Max residual before the first step and after every accepted step.
    pub history: Vec<f64>,
}

impl ChartSolve {
    pub fn iterations(&self) -> usize {
        self.history.len().saturating_sub(1)
    }

    /// Contraction factors e_{k+1}/e_k of the residual history.
    pub fn contraction_factors(&self) -> Vec<f64> {
        self.history.windows(2).map(|w| w[1] / w[0]).collect()
    }

    /// Ratio test over the last three steps: each contraction factor is below
    /// the previous one. Histories with fewer than two steps pass trivially.
    pub fn superlinear(&self) -> bool {
        let f = self.contraction_factors();
        let tail = &f[f.len().saturating_sub(3)..];
        tail.windows(2).all(|w| w[1] < w[0])
    }
}

#[derive(Clone, Debug)]
pub struct FoliationLeaf {
    pub k: f64,
    pub side: Side,
    pub graph: ScalarField,
    pub metric: MetricField,
    pub shape: OperatorField,
    pub third: MetricField,
    /// Max |K_leaf − K| over the solved samples.
    pub residual: f64,
    pub method: SolveMethod,
    pub charts: Vec<ChartSolve>,
}

impl FoliationLeaf {
    pub fn iterations(&self) -> usize {
        self.charts.iter().map(ChartSolve::iterations).max().unwrap_or(0)
    }

    /// Smallest principal curvature away from bounded chart edges, where the
    /// Dirichlet data meet one-sided stencils.
    pub fn min_principal_interior(&self) -> f64 {
        self.shape
            .iter()
            .filter(|(c, i, _)| !self.shape.atlas.charts[*c].grid.near_edge(*i, EDGE_MARGIN))
            .map(|(_, _, b)| b.real_eigenvalues().1)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn embedding(&self) -> EmbeddingData {
        EmbeddingData { metric: self.metric.clone(), shape: self.shape.clone(), side: self.side }
    }
}

/// Parameter at which the family leaf through a sample with datum `b` has
/// curvature `k`: the largest root x = e^{2r} of x² + (s tr + 2 tr/k)x + det = 0.
pub fn pointwise_param(side: Side, b: &Mat2, k: f64) -> Option<f64> {
    let (t, d) = (b.trace(), b.det());
    let p = side.sign() * t + 2.0 * t / k;
    let disc = p * p - 4.0 * d;
    if !(disc >= 0.0) {
        return None;
    }
    let root = disc.sqrt();
    let x = if p <= 0.0 { 0.5 * (root - p) } else { -2.0 * d / (p + root) };
    (x > 0.0 && x.is_finite()).then(|| 0.5 * x.ln())
}

/// (sup over samples of the curvature of the first leaf, 0).
pub fn attainable_range(f: &EndFamily) -> (f64, f64) {
    let lo = f
        .datum
        .bstar
        .iter()
        .map(|(_, _, b)| closed_form_curvature(f.side, f.start, b))
        .fold(f64::NEG_INFINITY, f64::max);
    (lo, 0.0)
}

fn is_homogeneous(f: &EndFamily) -> bool {
    let mut it = f.datum.bstar.iter().map(|(_, _, b)| (b.trace(), b.det()));
    let Some((t0, d0)) = it.next() else {
        return true;
    };
    let scale = HOMOGENEOUS_TOL * (1.0 + t0.abs() + d0.abs());
    it.all(|(t, d)| (t - t0).abs() <= scale && (d - d0).abs() <= scale)
}

/// Smooth bump on a chart, 1 at the centre of the bounded axes and 0 on the
/// band held fixed along their edges.
fn interior_bump(grid: &Grid, idx: usize) -> f64 {
    let (i, j) = grid.ij(idx);
    grid.axes()
        .iter()
        .zip([i, j])
        .filter(|(ax, _)| !ax.periodic)
        .map(|(ax, p)| {
            let span = (ax.n - 1 - 2 * EDGE_MARGIN) as f64;
            let t = ((p as f64 - EDGE_MARGIN as f64) / span).clamp(0.0, 1.0);
            (std::f64::consts::PI * t).sin()
        })
        .product()
}

/// Components (xx, xy, yy) of I_u + s du⊗du on chart `k`.
fn graph_metric_chart(f: &EndFamily, k: usize, u: &[f64]) -> [Vec<f64>; 3] {
    let grid = &f.datum.istar.atlas.charts[k].grid;
    let (ux, uy) = (d1(u, grid, 0), d1(u, grid, 1));
    let s = f.side.sign();
    let mut comps = [vec![0.0; u.len()], vec![0.0; u.len()], vec![0.0; u.len()]];
    for i in 0..u.len() {
        let (_, m) = f.ambient_metric(u[i], k, i);
        comps[0][i] = m.xx + s * ux[i] * ux[i];
        comps[1][i] = m.xy + s * ux[i] * uy[i];
        comps[2][i] = m.yy + s * uy[i] * uy[i];
    }
    comps
}

fn chart_curvature(f: &EndFamily, k: usize, u: &[f64]) -> Vec<f64> {
    let grid = &f.datum.istar.atlas.charts[k].grid;
    let [e, fc, g] = graph_metric_chart(f, k, u);
    let definite = (0..u.len()).all(|i| e[i] > 0.0 && e[i] * g[i] - fc[i] * fc[i] > 0.0);
    if !definite {
        return vec![f64::NAN; u.len()];
    }
    brioschi(grid, &e, &fc, &g)
}

fn max_residual(kk: &[f64], unknowns: &[usize], target: f64) -> f64 {
    unknowns.iter().fold(0.0f64, |m, &i| {
        let r = (kk[i] - target).abs();
        if r.is_nan() {
            f64::INFINITY
        } else {
            m.max(r)
        }
    })
}

fn color_period(ax: &Axis) -> usize {
    if ax.periodic {
        (COLOR_SPACING..=ax.n).find(|d| ax.n.is_multiple_of(*d)).unwrap_or(ax.n)
    } else {
        COLOR_SPACING.min(ax.n)
    }
}

/// Index along an axis of the sample of class `a` (mod `c`) nearest to `p`.
fn nearest_of_class(p: usize, a: usize, c: usize, ax: &Axis) -> Option<usize> {
    let below = p as isize - ((p + c - a % c) % c) as isize;
    let above = below + c as isize;
    let n = ax.n as isize;
    let resolve = |q: isize| {
        if ax.periodic {
            Some(q.rem_euclid(n) as usize)
        } else if (0..n).contains(&q) {
            Some(q as usize)
        } else {
            None
        }
    };
    let (dist_below, dist_above) = (p as isize - below, above - p as isize);
    match (resolve(below), resolve(above)) {
        (Some(b), Some(t)) => Some(if dist_below <= dist_above { b } else { t }),
        (b, t) => b.or(t),
    }
}

/// Damped Newton for K(graph) = target on the interior of chart `k`, with
/// the boundary held at `u`'s values.
fn newton_chart(
    f: &EndFamily,
    k: usize,
    u: &mut [f64],
    target: f64,
    tol: &Tolerances,
    opts: &SolverOptions,
) -> Result<ChartSolve> {
    let chart = &f.datum.istar.atlas.charts[k];
    let grid = &chart.grid;
    let axes = grid.axes();
    let unknowns: Vec<usize> = (0..grid.len()).filter(|&i| !grid.near_edge(i, EDGE_MARGIN)).collect();
    let mut column = vec![usize::MAX; grid.len()];
    for (c, &i) in unknowns.iter().enumerate() {
        column[i] = c;
    }
    let periods = [color_period(&axes[0]), color_period(&axes[1])];
    let n = unknowns.len();
    let mut kk = chart_curvature(f, k, u);
    let mut res = max_residual(&kk, &unknowns, target);
    let mut history = vec![res];
    let fail = |history: Vec<f64>| Error::NoConvergence { chart: chart.id.clone(), history };
    if n == 0 {
        return Ok(ChartSolve { chart: chart.id.clone(), unknowns: 0, history });
    }
    if !res.is_finite() {
        return Err(fail(history));
    }
    let stop = STOP_FRACTION * tol.newton;
    for _ in 0..opts.max_iter {
        if res <= stop {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for a in 0..periods[0] {
            for b in 0..periods[1] {
                let members: Vec<usize> = unknowns
                    .iter()
                    .copied()
                    .filter(|&i| {
                        let (p, q) = grid.ij(i);
                        p % periods[0] == a && q % periods[1] == b
                    })
                    .collect();
                if members.is_empty() {
                    continue;
                }
                let mut trial = u.to_vec();
                for &i in &members {
                    trial[i] += FD_STEP * (1.0 + u[i].abs());
                }
                let kt = chart_curvature(f, k, &trial);
                for (row, &i) in unknowns.iter().enumerate() {
                    let dk = kt[i] - kk[i];
                    if dk == 0.0 {
                        continue;
                    }
                    let (p, q) = grid.ij(i);
                    let (Some(pp), Some(qq)) =
                        (nearest_of_class(p, a, periods[0], &axes[0]), nearest_of_class(q, b, periods[1], &axes[1]))
                    else {
                        continue;
                    };
                    let src = grid.index(pp, qq);
                    if column[src] != usize::MAX {
                        jac[(row, column[src])] = dk / (trial[src] - u[src]);
                    }
                }
            }
        }
        let rhs = DVector::from_iterator(n, unknowns.iter().map(|&i| target - kk[i]));
        let Some(step) = jac.lu().solve(&rhs) else {
            return Err(fail(history));
        };
        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let mut trial = u.to_vec();
            for (c, &i) in unknowns.iter().enumerate() {
                trial[i] += scale * step[c];
            }
            let kt = chart_curvature(f, k, &trial);
            let rt = max_residual(&kt, &unknowns, target);
            if rt < res {
                accepted = Some((trial, kt, rt));
                break;
            }
            scale *= 0.5;
        }
        let Some((trial, kt, rt)) = accepted else {
            break;
        };
        u.copy_from_slice(&trial);
        kk = kt;
        res = rt;
        history.push(res);
    }
    if res > tol.newton {
        return Err(fail(history));
    }
    Ok(ChartSolve { chart: chart.id.clone(), unknowns: n, history })
}

/// Induced metric, second fundamental form and shape operator of the graph
/// {(x, u(x))} in σdr² + I_r (σ = ±1 by side).
pub fn graph_geometry(f: &EndFamily, u: &ScalarField) -> Result<(MetricField, MetricField, OperatorField)> {
    f.datum.istar.check_atlas(u)?;
    let s = f.side.sign();
    let atlas = &u.atlas;
    let mut metric = Vec::new();
    let mut second = Vec::new();
    let mut shape = Vec::new();
    for (k, chart) in atlas.charts.iter().enumerate() {
        let grid = &chart.grid;
        let uv = &u.values[k];
        let du = [d1(uv, grid, 0), d1(uv, grid, 1)];
        let hess = [d2(uv, grid, 0), d01(uv, grid), d2(uv, grid, 1)];
        let mut fam_i = Vec::with_capacity(uv.len());
        let mut fam_ii = Vec::with_capacity(uv.len());
        let mut fam_b = Vec::with_capacity(uv.len());
        for (i, &r) in uv.iter().enumerate() {
            let g = f.datum.istar.values[k][i];
            let (p, q) = flow_maps(f.side, r, &f.datum.bstar.values[k][i]);
            let pinv =
                p.inverse().ok_or_else(|| Error::SingularLeaf { param: r, chart: chart.id.clone(), index: i })?;
            fam_i.push(g.pullback(&p).scale(0.5));
            fam_ii.push(g.pair(&p, &q).scale(0.5));
            fam_b.push(pinv * q);
        }
        let comp = |c: usize| -> Vec<f64> { fam_i.iter().map(|m| [m.xx, m.xy, m.yy][c]).collect() };
        let comps = [comp(0), comp(1), comp(2)];
        // total derivatives along the graph, d_l g_c
        let dg: [[Vec<f64>; 3]; 2] = [
            [d1(&comps[0], grid, 0), d1(&comps[1], grid, 0), d1(&comps[2], grid, 0)],
            [d1(&comps[0], grid, 1), d1(&comps[1], grid, 1), d1(&comps[2], grid, 1)],
        ];
        let (mut gm, mut iim, mut bm) = (Vec::new(), Vec::new(), Vec::new());
        for i in 0..uv.len() {
            let g = fam_i[i];
            let ii = fam_ii[i];
            let b = fam_b[i];
            let d = [du[0][i], du[1][i]];
            let iic = [ii.xx, ii.xy, ii.yy];
            // derivative at fixed r: subtract ∂_r g · ∂_l u = 2 II · ∂_l u
            let part = |l: usize, c: usize| dg[l][c][i] - 2.0 * iic[c] * d[l];
            let gi = g.inverse().ok_or_else(|| Error::NotPositiveDefinite { chart: chart.id.clone(), index: i })?;
            let gim = [[gi.xx, gi.xy], [gi.xy, gi.yy]];
            let c = |a: usize, b: usize| a + b;
            let mut gamma_du = [[0.0; 2]; 2];
            for a in 0..2 {
                for bb in 0..2 {
                    let mut acc = 0.0;
                    for kk in 0..2 {
                        let mut gk = 0.0;
                        for l in 0..2 {
                            gk += gim[kk][l] * (part(a, c(bb, l)) + part(bb, c(a, l)) - part(l, c(a, bb)));
                        }
                        acc += 0.5 * gk * d[kk];
                    }
                    gamma_du[a][bb] = acc;
                }
            }
            let bu = [b.0[0][0] * d[0] + b.0[1][0] * d[1], b.0[0][1] * d[0] + b.0[1][1] * d[1]];
            let hs = [[hess[0][i], hess[1][i]], [hess[1][i], hess[2][i]]];
            let h =
                |a: usize, bb: usize| -hs[a][bb] + gamma_du[a][bb] + s * iic[c(a, bb)] + d[bb] * bu[a] + d[a] * bu[bb];
            let w = (s + gi.quad(d)).abs().sqrt();
            let second_form = Sym2::new(h(0, 0), h(0, 1), h(1, 1)).scale(s / w);
            let induced = Sym2::new(g.xx + s * d[0] * d[0], g.xy + s * d[0] * d[1], g.yy + s * d[1] * d[1]);
            let op = raise(&induced, &second_form)
                .ok_or_else(|| Error::NotPositiveDefinite { chart: chart.id.clone(), index: i })?;
            gm.push(induced);
            iim.push(second_form);
            bm.push(op);
        }
        metric.push(gm);
        second.push(iim);
        shape.push(bm);
    }
    Ok((
        Field { role: "I_leaf".into(), atlas: atlas.clone(), values: metric },
        Field { role: "II_leaf".into(), atlas: atlas.clone(), values: second },
        Field { role: "B_leaf".into(), atlas: atlas.clone(), values: shape },
    ))
}

/// Locates the leaf of constant curvature `k`: in closed form when B* has a
/// spatially constant eigenvalue pair, otherwise by damped Newton per chart
/// with the boundary held at the pointwise closed-form parameters.
pub fn solve_leaf(f: &EndFamily, k: f64, tol: &Tolerances, opts: &SolverOptions) -> Result<FoliationLeaf> {
    let (lo, hi) = attainable_range(f);
    let out = || Error::OutOfRange { k, lo, hi };
    if !(k > lo && k < hi) {
        return Err(out());
    }
    let b = &f.datum.bstar;
    let pointwise = b.map("r", |m| pointwise_param(f.side, m, k).unwrap_or(f64::NAN));
    if pointwise.iter().any(|(_, _, r)| !(*r >= f.start - 1e-9)) {
        return Err(out());
    }
    let (graph, method, charts, residual) = if is_homogeneous(f) && !opts.force_newton {
        let residual = b
            .iter()
            .map(|(c, i, m)| (closed_form_curvature(f.side, pointwise.values[c][i], m) - k).abs())
            .fold(0.0f64, f64::max);
        if residual > tol.leaf {
            return Err(Error::NoConvergence { chart: "closed form".into(), history: vec![residual] });
        }
        (pointwise.with_role("r_K"), SolveMethod::ClosedForm, Vec::new(), residual)
    } else {
        let mut graph = pointwise.with_role("r_K");
        let mut charts = Vec::new();
        let mut residual = 0.0f64;
        for (c, chart) in f.datum.istar.atlas.charts.iter().enumerate() {
            for i in 0..chart.grid.len() {
                graph.values[c][i] += opts.initial_offset * interior_bump(&chart.grid, i);
            }
            let solve = newton_chart(f, c, &mut graph.values[c], k, tol, opts)?;
            residual = residual.max(*solve.history.last().unwrap_or(&0.0));
            charts.push(solve);
        }
        (graph, SolveMethod::Newton, charts, residual)
    };
    let (metric, _, shape) = graph_geometry(f, &graph)?;
    let third = metric.pullback_by(&shape, "III_leaf")?;
    Ok(FoliationLeaf { k, side: f.side, graph, metric, shape, third, residual, method, charts })
}

/// One line of the sweep table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "K")]
    pub k: f64,
    /// Curvature of the dual leaf on the other side.
    #[serde(rename = "K_dual")]
    pub k_dual: f64,
    pub r_mean: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub area: f64,
    pub area_gb: Option<f64>,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepReport {
    pub side: Side,
    pub rows: Vec<SweepRow>,
    /// Graphs strictly increase with K at every sample.
    pub nested: bool,
    /// Max relative area mismatch against Gauss–Bonnet, when a signature is given.
    pub max_area_error: Option<f64>,
}

impl SweepReport {
    pub fn pass(&self) -> bool {
        self.nested && self.max_area_error.is_none_or(|e| e <= AREA_TOLERANCE)
    }
}

/// Solves the leaves for strictly increasing `ks`, checks nesting and
/// compares areas with Gauss–Bonnet. `weights` are quadrature weights for the
/// area integral.
pub fn foliation_sweep(
    f: &EndFamily,
    ks: &[f64],
    tol: &Tolerances,
    opts: &SolverOptions,
    weights: Option<&ScalarField>,
    signature: Option<&ConeSignature>,
) -> Result<(Vec<FoliationLeaf>, SweepReport)> {
    if ks.is_empty() || ks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("curvature grid must be non-empty and strictly increasing".into()));
    }
    let leaves = ks.iter().map(|&k| solve_leaf(f, k, tol, opts)).collect::<Result<Vec<_>>>()?;
    let nested = leaves.windows(2).all(|w| w[0].graph.iter().all(|(c, i, r)| *r < w[1].graph.values[c][i]));
    let mut rows = Vec::with_capacity(leaves.len());
    let mut max_area_error: Option<f64> = None;
    for leaf in &leaves {
        let a = area(&leaf.metric, weights)?;
        let area_gb = signature.map(|s| gauss_bonnet_area(s, leaf.k)).transpose()?;
        if let Some(gb) = area_gb {
            let e = (a - gb).abs() / gb;
            max_area_error = Some(max_area_error.map_or(e, |m| m.max(e)));
        }
        let k_dual = match f.side {
            Side::Hyperbolic => dual_curvature(leaf.k)?,
            Side::DeSitter => dual_curvature_inverse(leaf.k)?,
        };
        rows.push(SweepRow {
            k: leaf.k,
            k_dual,
            r_mean: leaf.graph.mean(),
            r_min: leaf.graph.min(),
            r_max: leaf.graph.max(),
            area: a,
            area_gb,
            residual: leaf.residual,
        });
    }
    Ok((leaves, SweepReport { side: f.side, rows, nested, max_area_error }))
}
