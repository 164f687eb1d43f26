//! Fourth-order finite differences and interpolation on chart grids.

use super::atlas::Grid;

fn along(grid: &Grid, axis: usize) -> (usize, f64, bool, usize) {
    let a = grid.axes()[axis];
    let stride = if axis == 0 { grid.dims()[1] } else { 1 };
    (a.n, a.step, a.periodic, stride)
}

// Fourth-order one-sided stencils for the first two samples of a bounded
// axis, as (first offset, weights). Their leading error term equals that of
// the centered stencil, so derivatives of computed derivatives keep full
// order up to the boundary.
const D1_EDGE: [(isize, [f64; 6]); 2] = [
    (0, [-9.0 / 4.0, 29.0 / 6.0, -14.0 / 3.0, 3.0, -13.0 / 12.0, 1.0 / 6.0]),
    (-1, [-1.0 / 6.0, -5.0 / 4.0, 7.0 / 3.0, -4.0 / 3.0, 1.0 / 2.0, -1.0 / 12.0]),
];
const D2_EDGE: [(isize, [f64; 7]); 2] = [
    (0, [9.0 / 2.0, -52.0 / 3.0, 349.0 / 12.0, -28.0, 49.0 / 3.0, -16.0 / 3.0, 3.0 / 4.0]),
    (-1, [3.0 / 4.0, -3.0 / 4.0, -19.0 / 12.0, 17.0 / 6.0, -7.0 / 4.0, 7.0 / 12.0, -1.0 / 12.0]),
];
const D1_CENTER: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
const D2_CENTER: [f64; 5] = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];

/// Samples a bounded axis needs for the edge stencils.
pub const MIN_SAMPLES: usize = 7;

fn apply<const N: usize>(
    v: &[f64],
    grid: &Grid,
    axis: usize,
    odd: bool,
    center: &[f64; 5],
    edge: &[(isize, [f64; N]); 2],
) -> Vec<f64> {
    let (n, h, periodic, stride) = along(grid, axis);
    let scale = 1.0 / h.powi(if odd { 1 } else { 2 });
    (0..v.len())
        .map(|idx| {
            let p = if axis == 0 { idx / stride } else { idx % grid.dims()[1] };
            let base = idx - p * stride;
            let at = |q: isize| {
                let q = if periodic { q.rem_euclid(n as isize) } else { q } as usize;
                v[base + q * stride]
            };
            let p = p as isize;
            let n = n as isize;
            // weighted sum of differences against the centre value, exact for constants
            let c = at(p);
            let sum = |offsets: &mut dyn Iterator<Item = (isize, f64)>| {
                offsets.map(|(o, w)| w * (at(p + o) - c)).sum::<f64>()
            };
            let d = if periodic || (p >= 2 && p < n - 2) {
                sum(&mut center.iter().enumerate().map(|(m, w)| (m as isize - 2, *w)))
            } else if p < 2 {
                let (start, w) = &edge[p as usize];
                sum(&mut w.iter().enumerate().map(|(m, w)| (start + m as isize, *w)))
            } else {
                // mirror image: offsets flip sign, odd derivatives flip sign
                let (start, w) = &edge[(n - 1 - p) as usize];
                let s = if odd { -1.0 } else { 1.0 };
                sum(&mut w.iter().enumerate().map(|(m, w)| (-(start + m as isize), s * *w)))
            };
            d * scale
        })
        .collect()
}

/// ∂v/∂xᵃ, fourth order.
pub fn d1(v: &[f64], grid: &Grid, axis: usize) -> Vec<f64> {
    apply(v, grid, axis, true, &D1_CENTER, &D1_EDGE)
}

/// ∂²v/∂(xᵃ)², fourth order.
pub fn d2(v: &[f64], grid: &Grid, axis: usize) -> Vec<f64> {
    apply(v, grid, axis, false, &D2_CENTER, &D2_EDGE)
}

/// ∂²v/∂x⁰∂x¹.
pub fn d01(v: &[f64], grid: &Grid) -> Vec<f64> {
    d1(&d1(v, grid, 0), grid, 1)
}

/// Bilinear or cubic Lagrange interpolation; `None` when the stencil leaves
/// the grid.
pub fn interpolate(v: &[f64], grid: &Grid, p: [f64; 2], cubic: bool) -> Option<f64> {
    let (cell, frac) = grid.locate(p)?;
    let axes = grid.axes();
    let offsets: Vec<isize> = if cubic { vec![-1, 0, 1, 2] } else { vec![0, 1] };
    let weights = |t: f64| -> Vec<f64> {
        if cubic {
            vec![
                -t * (t - 1.0) * (t - 2.0) / 6.0,
                (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
                -(t + 1.0) * t * (t - 2.0) / 2.0,
                (t + 1.0) * t * (t - 1.0) / 6.0,
            ]
        } else {
            vec![1.0 - t, t]
        }
    };
    let w = [weights(frac[0]), weights(frac[1])];
    let mut idx = [[0usize; 4]; 2];
    for k in 0..2 {
        for (m, o) in offsets.iter().enumerate() {
            let q = cell[k] as isize + o;
            let n = axes[k].n as isize;
            idx[k][m] = if axes[k].periodic {
                q.rem_euclid(n) as usize
            } else if q < 0 || q >= n {
                return None;
            } else {
                q as usize
            };
        }
    }
    let mut s = 0.0;
    for a in 0..offsets.len() {
        for b in 0..offsets.len() {
            s += w[0][a] * w[1][b] * v[grid.index(idx[0][a], idx[1][b])];
        }
    }
    Some(s)
}
