use super::diff::MIN_SAMPLES;
use crate::{Error, Result};
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Sampling grid of a chart. Samples are stored row-major: the first axis is
/// the slow index (x for rect charts, r for polar charts).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Grid {
    Rect {
        origin: [f64; 2],
        spacing: [f64; 2],
        dims: [usize; 2],
        /// Per-axis period; `None` for a bounded axis.
        #[serde(default)]
        period: [Option<f64>; 2],
    },
    Polar {
        r_min: f64,
        r_max: f64,
        n_r: usize,
        #[serde(rename = "n_α", alias = "n_alpha")]
        n_alpha: usize,
        /// Angular period, equal to the cone angle.
        period: f64,
    },
}

/// One coordinate axis of a grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub step: f64,
    pub n: usize,
    pub periodic: bool,
}

impl Axis {
    pub fn coord(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }
}

impl Grid {
    pub fn rect(origin: [f64; 2], spacing: [f64; 2], dims: [usize; 2]) -> Self {
        Grid::Rect { origin, spacing, dims, period: [None, None] }
    }

    pub fn polar(r_min: f64, r_max: f64, n_r: usize, n_alpha: usize, period: f64) -> Self {
        Grid::Polar { r_min, r_max, n_r, n_alpha, period }
    }

    pub fn axes(&self) -> [Axis; 2] {
        match self {
            Grid::Rect { origin, spacing, dims, period } => [
                Axis { start: origin[0], step: spacing[0], n: dims[0], periodic: period[0].is_some() },
                Axis { start: origin[1], step: spacing[1], n: dims[1], periodic: period[1].is_some() },
            ],
            Grid::Polar { r_min, r_max, n_r, n_alpha, period } => [
                Axis { start: *r_min, step: (r_max - r_min) / (*n_r as f64 - 1.0), n: *n_r, periodic: false },
                Axis { start: 0.0, step: period / *n_alpha as f64, n: *n_alpha, periodic: true },
            ],
        }
    }

    pub fn dims(&self) -> [usize; 2] {
        let a = self.axes();
        [a[0].n, a[1].n]
    }

    pub fn len(&self) -> usize {
        let d = self.dims();
        d[0] * d[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.dims()[1] + j
    }

    pub fn ij(&self, idx: usize) -> (usize, usize) {
        let n1 = self.dims()[1];
        (idx / n1, idx % n1)
    }

    pub fn coord(&self, idx: usize) -> [f64; 2] {
        let (i, j) = self.ij(idx);
        let a = self.axes();
        [a[0].coord(i), a[1].coord(j)]
    }

    pub fn is_polar(&self) -> bool {
        matches!(self, Grid::Polar { .. })
    }

    /// True on samples lying on a bounded edge of the grid.
    pub fn on_boundary(&self, idx: usize) -> bool {
        let (i, j) = self.ij(idx);
        let a = self.axes();
        (!a[0].periodic && (i == 0 || i + 1 == a[0].n)) || (!a[1].periodic && (j == 0 || j + 1 == a[1].n))
    }

    /// True within `margin` samples of a bounded edge, where difference
    /// stencils are one-sided.
    pub fn near_edge(&self, idx: usize, margin: usize) -> bool {
        let (i, j) = self.ij(idx);
        let a = self.axes();
        let close = |p: usize, ax: &Axis| !ax.periodic && (p < margin || p + margin >= ax.n);
        close(i, &a[0]) || close(j, &a[1])
    }

    /// Trapezoid cell measure in chart coordinates.
    pub fn cell_measure(&self, idx: usize) -> f64 {
        let (i, j) = self.ij(idx);
        let a = self.axes();
        let w = |ax: &Axis, k: usize| {
            if !ax.periodic && (k == 0 || k + 1 == ax.n) {
                0.5 * ax.step
            } else {
                ax.step
            }
        };
        w(&a[0], i) * w(&a[1], j)
    }

    /// Every second sample along each axis.
    pub fn coarsen(&self) -> Result<Grid> {
        match self {
            Grid::Rect { origin, spacing, dims, period } => {
                let mut nd = [0usize; 2];
                for k in 0..2 {
                    nd[k] = if period[k].is_some() {
                        if dims[k] % 2 != 0 {
                            return Err(Error::InvalidAtlas(
                                "periodic axis needs an even sample count to coarsen".into(),
                            ));
                        }
                        dims[k] / 2
                    } else {
                        (dims[k] - 1) / 2 + 1
                    };
                }
                Ok(Grid::Rect {
                    origin: *origin,
                    spacing: [2.0 * spacing[0], 2.0 * spacing[1]],
                    dims: nd,
                    period: *period,
                })
            }
            Grid::Polar { r_min, n_r, n_alpha, period, .. } => {
                if n_alpha % 2 != 0 {
                    return Err(Error::InvalidAtlas("angular axis needs an even sample count to coarsen".into()));
                }
                let dr = self.axes()[0].step;
                let nr = (n_r - 1) / 2 + 1;
                Ok(Grid::Polar {
                    r_min: *r_min,
                    r_max: r_min + 2.0 * dr * (nr as f64 - 1.0),
                    n_r: nr,
                    n_alpha: n_alpha / 2,
                    period: *period,
                })
            }
        }
    }

    /// Cell containing `p` with fractional offsets, or `None` outside the grid.
    pub fn locate(&self, p: [f64; 2]) -> Option<([usize; 2], [f64; 2])> {
        let axes = self.axes();
        let mut cell = [0usize; 2];
        let mut frac = [0f64; 2];
        for k in 0..2 {
            let ax = &axes[k];
            let mut s = (p[k] - ax.start) / ax.step;
            if ax.periodic {
                s = s.rem_euclid(ax.n as f64);
            } else if s < 0.0 || s > (ax.n - 1) as f64 {
                return None;
            }
            let mut c = s.floor() as usize;
            if !ax.periodic && c + 1 >= ax.n {
                c = ax.n - 2;
            }
            cell[k] = c.min(ax.n - 1);
            frac[k] = s - c as f64;
        }
        Some((cell, frac))
    }

    fn validate(&self) -> Result<()> {
        match self {
            Grid::Rect { spacing, dims, period, .. } => {
                for k in 0..2 {
                    if !(spacing[k] > 0.0) || dims[k] < MIN_SAMPLES {
                        return Err(Error::InvalidAtlas(
                            "rect chart needs spacing > 0 and at least 7 samples per axis".into(),
                        ));
                    }
                    if let Some(p) = period[k] {
                        if (p - spacing[k] * dims[k] as f64).abs() > 1e-9 * p.abs() {
                            return Err(Error::InvalidAtlas(format!("period {p} inconsistent with dims × spacing")));
                        }
                    }
                }
                Ok(())
            }
            Grid::Polar { r_min, r_max, n_r, n_alpha, period } => {
                if !(*r_min > 0.0)
                    || !(r_max > r_min)
                    || *n_r < MIN_SAMPLES
                    || *n_alpha < MIN_SAMPLES
                    || !(*period > 0.0)
                {
                    return Err(Error::InvalidAtlas(
                        "polar chart needs 0 < r_min < r_max, period > 0 and at least 7 samples per axis".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// A named chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub id: String,
    #[serde(flatten)]
    pub grid: Grid,
}

/// A sector of a polar cone chart mapped isometrically into a Poincaré disk chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeSector {
    pub alpha_start: f64,
    pub alpha_end: f64,
    /// Image of the cone point in the disk chart.
    pub vertex: [f64; 2],
    /// Euclidean direction at the vertex of the ray α = alpha_start.
    pub direction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum OverlapMap {
    /// z ↦ (a z + b)/(c z + d) between conformal rect coordinates; entries as [re, im].
    Moebius { matrix: [[f64; 2]; 4] },
    /// Geodesic polar coordinates of a cone chart, sector by sector, into a disk chart.
    DiskConeSectors { sectors: Vec<ConeSector> },
}

/// Transition map from chart `from` to chart `to`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Overlap {
    pub from: String,
    pub to: String,
    pub map: OverlapMap,
}

impl Overlap {
    /// Image of a `from`-chart coordinate in `to`-chart coordinates.
    pub fn map_point(&self, p: [f64; 2]) -> Option<[f64; 2]> {
        match &self.map {
            OverlapMap::Moebius { matrix } => {
                let m: Vec<C> = matrix.iter().map(|e| C::new(e[0], e[1])).collect();
                let z = C::new(p[0], p[1]);
                let den = m[2] * z + m[3];
                if den.norm() == 0.0 {
                    return None;
                }
                let w = (m[0] * z + m[1]) / den;
                Some([w.re, w.im])
            }
            OverlapMap::DiskConeSectors { sectors } => {
                let (r, alpha) = (p[0], p[1]);
                let s = sectors.iter().find(|s| alpha >= s.alpha_start && alpha < s.alpha_end)?;
                let w = C::from_polar((0.5 * r).tanh(), s.direction + alpha - s.alpha_start);
                let v = C::new(s.vertex[0], s.vertex[1]);
                let z = (w + v) / (C::new(1.0, 0.0) + v.conj() * w);
                Some([z.re, z.im])
            }
        }
    }

    /// Jacobian ∂(to)/∂(from) by central differences of the map.
    pub fn jacobian(&self, p: [f64; 2]) -> Option<[[f64; 2]; 2]> {
        let mut jac = [[0.0; 2]; 2];
        for k in 0..2 {
            let h = 1e-6 * (1.0 + p[k].abs());
            let mut a = p;
            let mut b = p;
            a[k] += h;
            b[k] -= h;
            let fa = self.map_point(a)?;
            let fb = self.map_point(b)?;
            for r in 0..2 {
                jac[r][k] = (fa[r] - fb[r]) / (2.0 * h);
            }
        }
        Some(jac)
    }
}

/// Charts and overlap maps carrying all sampled fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartAtlas {
    pub charts: Vec<Chart>,
    #[serde(default)]
    pub overlaps: Vec<Overlap>,
}

impl ChartAtlas {
    pub fn new(charts: Vec<Chart>, overlaps: Vec<Overlap>) -> Result<Self> {
        let atlas = ChartAtlas { charts, overlaps };
        atlas.validate()?;
        Ok(atlas)
    }

    pub fn single(id: &str, grid: Grid) -> Result<Self> {
        ChartAtlas::new(vec![Chart { id: id.to_string(), grid }], vec![])
    }

    pub fn validate(&self) -> Result<()> {
        if self.charts.is_empty() {
            return Err(Error::InvalidAtlas("atlas has no charts".into()));
        }
        let mut ids = HashSet::new();
        for c in &self.charts {
            if !ids.insert(c.id.as_str()) {
                return Err(Error::InvalidAtlas(format!("duplicate chart id {}", c.id)));
            }
            c.grid.validate()?;
        }
        for o in &self.overlaps {
            let from = self
                .chart_index(&o.from)
                .ok_or_else(|| Error::InvalidAtlas(format!("overlap references unknown chart {}", o.from)))?;
            self.chart_index(&o.to)
                .ok_or_else(|| Error::InvalidAtlas(format!("overlap references unknown chart {}", o.to)))?;
            match &o.map {
                OverlapMap::Moebius { matrix } => {
                    let m: Vec<C> = matrix.iter().map(|e| C::new(e[0], e[1])).collect();
                    if (m[0] * m[3] - m[1] * m[2]).norm() == 0.0 {
                        return Err(Error::InvalidAtlas("overlap Möbius map is singular".into()));
                    }
                }
                OverlapMap::DiskConeSectors { sectors } => {
                    let Grid::Polar { period, .. } = self.charts[from].grid else {
                        return Err(Error::InvalidAtlas("cone sectors must start from a polar chart".into()));
                    };
                    let mut a = 0.0;
                    for s in sectors {
                        if (s.alpha_start - a).abs() > 1e-12 || !(s.alpha_end > s.alpha_start) {
                            return Err(Error::InvalidAtlas(
                                "cone sectors must tile the angular period in order".into(),
                            ));
                        }
                        if s.vertex[0].hypot(s.vertex[1]) >= 1.0 {
                            return Err(Error::InvalidAtlas("cone sector vertex outside the unit disk".into()));
                        }
                        a = s.alpha_end;
                    }
                    if (a - period).abs() > 1e-12 {
                        return Err(Error::InvalidAtlas("cone sectors do not cover the angular period".into()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn chart_index(&self, id: &str) -> Option<usize> {
        self.charts.iter().position(|c| c.id == id)
    }

    pub fn total_samples(&self) -> usize {
        self.charts.iter().map(|c| c.grid.len()).sum()
    }

    /// Polar charts in declaration order; one per cone point.
    pub fn cone_charts(&self) -> Vec<usize> {
        (0..self.charts.len()).filter(|&k| self.charts[k].grid.is_polar()).collect()
    }

    /// Checks that cone charts match the signature's angles in order.
    pub fn check_angles(&self, angles: &[f64]) -> Result<()> {
        let cones = self.cone_charts();
        if cones.len() != angles.len() {
            return Err(Error::AtlasMismatch(format!("{} cone charts for {} cone points", cones.len(), angles.len())));
        }
        for (k, a) in cones.iter().zip(angles) {
            if let Grid::Polar { period, .. } = self.charts[*k].grid {
                if (period - a).abs() > 1e-12 * a.abs().max(1.0) {
                    return Err(Error::AtlasMismatch(format!(
                        "cone chart {} has period {period}, expected {a}",
                        self.charts[*k].id
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn coarsen(&self) -> Result<ChartAtlas> {
        let charts = self
            .charts
            .iter()
            .map(|c| Ok(Chart { id: c.id.clone(), grid: c.grid.coarsen()? }))
            .collect::<Result<Vec<_>>>()?;
        ChartAtlas::new(charts, self.overlaps.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn indexing_roundtrip() {
        let g = Grid::rect([0.0, 1.0], [0.5, 0.25], [5, 7]);
        let idx = g.index(3, 4);
        assert_eq!(g.ij(idx), (3, 4));
        assert_eq!(g.coord(idx), [1.5, 2.0]);
        assert!(g.on_boundary(g.index(0, 3)));
        assert!(!g.on_boundary(g.index(2, 3)));
    }

    #[test]
    fn polar_axis_is_periodic() {
        let g = Grid::polar(1e-3, 1.0, 11, 8, PI / 2.0);
        let a = g.axes();
        assert!(a[1].periodic && !a[0].periodic);
        assert!((a[1].step - PI / 16.0).abs() < 1e-15);
        assert!(!g.on_boundary(g.index(3, 0)));
        let (cell, frac) = g.locate([0.5, PI / 2.0 + 0.01]).unwrap();
        assert_eq!(cell[1], 0);
        assert!(frac[1] > 0.0);
    }

    #[test]
    fn coarsening_keeps_even_samples() {
        let g = Grid::rect([0.0, 0.0], [0.1, 0.1], [9, 9]);
        assert_eq!(g.coarsen().unwrap(), Grid::rect([0.0, 0.0], [0.2, 0.2], [5, 5]));
        let p = Grid::polar(0.1, 1.1, 11, 16, 1.0);
        let c = p.coarsen().unwrap();
        assert_eq!(c.dims(), [6, 8]);
        assert!((c.coord(c.index(5, 0))[0] - 1.1).abs() < 1e-12);
    }

    #[test]
    fn atlas_validation() {
        let c = Chart { id: "a".into(), grid: Grid::rect([0.0, 0.0], [0.1, 0.1], [3, 9]) };
        assert!(ChartAtlas::new(vec![c], vec![]).is_err());
        let a = Chart { id: "a".into(), grid: Grid::polar(1e-3, 1.0, 8, 8, 1.0) };
        let atlas = ChartAtlas::new(vec![a], vec![]).unwrap();
        assert!(atlas.check_angles(&[1.0]).is_ok());
        assert!(atlas.check_angles(&[1.5]).is_err());
    }

    #[test]
    fn cone_sector_map_is_isometric_at_vertex() {
        let o = Overlap {
            from: "c".into(),
            to: "d".into(),
            map: OverlapMap::DiskConeSectors {
                sectors: vec![ConeSector { alpha_start: 0.0, alpha_end: 1.0, vertex: [0.3, 0.1], direction: 0.2 }],
            },
        };
        let z = o.map_point([1e-7, 0.5]).unwrap();
        // tiny geodesic step from the vertex in direction 0.2 + 0.5
        let d = [z[0] - 0.3, z[1] - 0.1];
        assert!((d[1].atan2(d[0]) - 0.7).abs() < 1e-6);
        assert!(o.map_point([0.5, 1.5]).is_none());
    }
}
