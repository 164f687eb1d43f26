use super::holonomy::OCTAGON_INTERIOR_ANGLE;
use crate::family::{build_family, EndFamily, FamilyOptions, Side};
use crate::fields::{Chart, ChartAtlas, ConeSignature, Grid, MetricField, ScalarField};
use crate::infinity::{data_from_qd, InfinityData, QuadDiff};
use crate::linalg::Sym2;
use crate::tol::Tolerances;
use crate::Result;
use num_complex::Complex64 as C;
use std::f64::consts::PI;
use std::sync::Arc;

/// Radius in the disk below which the centre chart carries the quadrature weight.
const SPLIT_RADIUS: f64 = 0.2;
/// Hyperbolic radius of the cone chart; the octagon corners within it are weighted there.
const CONE_RADIUS: f64 = 1.8;
/// Outer Euclidean radius of the annulus chart; it reaches every octagon point
/// farther than `CONE_RADIUS` from the vertices.
const ANNULUS_OUTER: f64 = 0.82;
/// Sub-samples per cell axis for the quadrature weights.
const SUBSAMPLES: usize = 24;
/// Fewest samples per axis for which grid-halving checks still have 7 samples.
pub const MIN_RESOLUTION: usize = 13;
/// Samples per axis at the default resolution.
pub const DEFAULT_RESOLUTION: usize = 17;

/// Euclidean radii in the disk of the regular octagon's inscribed and circumscribed circles.
pub fn octagon_radii() -> (f64, f64) {
    let half = 0.5 * OCTAGON_INTERIOR_ANGLE;
    let eighth = PI / 8.0;
    let inradius = (half.cos() / eighth.sin()).acosh();
    let circumradius = (1.0 / (eighth.tan() * half.tan())).acosh();
    ((0.5 * inradius).tanh(), (0.5 * circumradius).tanh())
}

/// Hyperbolic distance from `z` to the nearest octagon vertex.
pub fn vertex_distance(z: C) -> f64 {
    let (_, e_out) = octagon_radii();
    (0..8)
        .map(|j| {
            let v = C::from_polar(e_out, j as f64 * PI / 4.0);
            2.0 * ((z - v).norm() / (C::new(1.0, 0.0) - v.conj() * z).norm()).atanh()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Whether a disk point lies in the octagon: outside the eight circles carrying its sides.
pub fn in_octagon(z: C) -> bool {
    let (e_in, _) = octagon_radii();
    let d = (1.0 + e_in * e_in) / (2.0 * e_in);
    let rho2 = d * d - 1.0;
    (0..8).all(|j| (z - C::from_polar(d, (2 * j + 1) as f64 * PI / 8.0)).norm_sqr() > rho2)
}

/// Genus-2 surface with one cone point of angle π/2, tiled by the regular octagon.
///
/// Charts: "center" is a rect chart in disk coordinates around the origin;
/// "annulus" uses w = s + iφ with z = e^w, φ periodic; "cone" is the polar chart
/// at the cone point, whose disk of radius 1.8 is the union of the eight
/// octagon corners. The "w" weights integrate over the surface exactly once:
/// the centre chart takes |z| < 0.2, the cone chart its whole disk, and the
/// annulus the rest of the octagon.
#[derive(Clone, Debug)]
pub struct OctagonSurface {
    pub atlas: Arc<ChartAtlas>,
    pub weights: ScalarField,
    pub signature: ConeSignature,
}

impl OctagonSurface {
    /// `n` samples per axis on the centre chart and radially on the cone chart,
    /// 16 angular samples on the cone chart; the annulus has 2n − 1 radial and
    /// 4(n − 1) angular samples.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_cone_resolution(n, n, 16)
    }

    /// As [`OctagonSurface::new`] with `n_r` × `n_alpha` samples on the cone chart.
    pub fn with_cone_resolution(n: usize, n_r: usize, n_alpha: usize) -> Result<Self> {
        if n < MIN_RESOLUTION || n_r < MIN_RESOLUTION || n_alpha < 8 || !n_alpha.is_multiple_of(2) {
            return Err(crate::Error::Domain(format!(
                "octagon resolution n = {n}, n_r = {n_r}, n_alpha = {n_alpha}: need n, n_r ≥ {MIN_RESOLUTION} and an even n_alpha ≥ 8"
            )));
        }
        let half_width = 1.1 * SPLIT_RADIUS;
        let h = 2.0 * half_width / (n - 1) as f64;
        let s0 = (0.9 * SPLIT_RADIUS).ln();
        let s1 = ANNULUS_OUTER.ln();
        let n_s = 2 * n - 1;
        let n_phi = 4 * (n - 1);
        let annulus = Grid::Rect {
            origin: [s0, 0.0],
            spacing: [(s1 - s0) / (n_s - 1) as f64, 2.0 * PI / n_phi as f64],
            dims: [n_s, n_phi],
            period: [None, Some(2.0 * PI)],
        };
        let charts = vec![
            Chart { id: "center".into(), grid: Grid::rect([-half_width, -half_width], [h, h], [n, n]) },
            Chart { id: "annulus".into(), grid: annulus },
            Chart { id: "cone".into(), grid: Grid::polar(1e-3, CONE_RADIUS, n_r, n_alpha, PI / 2.0) },
        ];
        let atlas = Arc::new(ChartAtlas::new(charts, vec![])?);
        let weights = quadrature_weights(&atlas);
        let signature = ConeSignature::new(2, vec![PI / 2.0])?;
        Ok(OctagonSurface { atlas, weights, signature })
    }

    /// Hyperbolic metric: 4|dz|²/(1 − |z|²)² on the disk charts, dr² + sinh²r dα² at the cone.
    pub fn hyperbolic_metric(&self) -> MetricField {
        MetricField::from_fn(&self.atlas, "I*", |k, _, p| match k {
            0 => Sym2::scalar(disk_density(C::new(p[0], p[1]))),
            1 => {
                let e2 = (2.0 * p[0]).exp();
                Sym2::scalar(4.0 * e2 / (1.0 - e2).powi(2))
            }
            _ => Sym2::new(1.0, 0.0, p[0].sinh().powi(2)),
        })
    }

    /// Data at infinity with II* = ½I* + ½Re q for the default perturbation.
    /// `eps = 0` gives the Fuchsian datum.
    pub fn datum(&self, eps: f64) -> Result<InfinityData> {
        self.datum_with(&Perturbation::default().scaled(eps))
    }

    pub fn datum_with(&self, pert: &Perturbation) -> Result<InfinityData> {
        let d = data_from_qd(&self.hyperbolic_metric(), &self.quad_diff(pert), &Tolerances::default())?;
        Ok(InfinityData { declared_curvature: Some(ScalarField::constant(&self.atlas, "K", -1.0)), ..d })
    }

    /// The perturbation as a quadratic differential with a declared simple pole at the cone point.
    pub fn quad_diff(&self, pert: &Perturbation) -> QuadDiff {
        QuadDiff::from_fn(&self.atlas, vec![1], |k, z| match k {
            0 => pert.disk(z),
            1 => {
                let e = z.exp();
                pert.disk(e) * e * e
            }
            _ => pert.cone(z),
        })
    }

    /// The end family of `datum(eps)` with search floor −2.
    pub fn family(&self, eps: f64, side: Side) -> Result<EndFamily> {
        family_of(&self.datum(eps)?, side)
    }
}

/// End family with search floor −2 and default tolerances.
pub fn family_of(d: &InfinityData, side: Side) -> Result<EndFamily> {
    let opts = FamilyOptions { search_floor: -2.0, r_max: None };
    build_family(d, side, &Tolerances::default(), &opts)
}

/// q = amplitude·e^{rate·z} dz² on the disk, (residue/z + constant) dz² in the
/// cone's uniformizing coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Perturbation {
    pub amplitude: C,
    pub rate: C,
    pub residue: C,
    pub constant: C,
}

impl Default for Perturbation {
    fn default() -> Self {
        Perturbation {
            amplitude: C::new(0.1, 0.05),
            rate: C::new(0.6, 0.8),
            residue: C::new(0.05, -0.02),
            constant: C::new(0.1, 0.0),
        }
    }
}

impl Perturbation {
    pub fn zero() -> Self {
        Perturbation::default().scaled(0.0)
    }

    pub fn scaled(&self, eps: f64) -> Self {
        Perturbation {
            amplitude: self.amplitude * eps,
            residue: self.residue * eps,
            constant: self.constant * eps,
            ..*self
        }
    }

    fn disk(&self, z: C) -> C {
        self.amplitude * (self.rate * z).exp()
    }

    fn cone(&self, z: C) -> C {
        self.residue / z + self.constant
    }
}

fn disk_density(z: C) -> f64 {
    4.0 / (1.0 - z.norm_sqr()).powi(2)
}

/// Cell of sample `i` on an axis: [lo, hi] clipped to the range on bounded axes.
fn cell(start: f64, step: f64, n: usize, i: usize, periodic: bool) -> (f64, f64) {
    let x = start + step * i as f64;
    let (mut lo, mut hi) = (x - 0.5 * step, x + 0.5 * step);
    if !periodic {
        lo = lo.max(start);
        hi = hi.min(start + step * (n - 1) as f64);
    }
    (lo, hi)
}

fn quadrature_weights(atlas: &Arc<ChartAtlas>) -> ScalarField {
    ScalarField::from_fn(atlas, "w", |k, idx, p| {
        let grid = &atlas.charts[k].grid;
        let axes = grid.axes();
        let (i, j) = grid.ij(idx);
        let (x0, x1) = cell(axes[0].start, axes[0].step, axes[0].n, i, axes[0].periodic);
        let (y0, y1) = cell(axes[1].start, axes[1].step, axes[1].n, j, axes[1].periodic);
        if grid.is_polar() {
            return (x1.cosh() - x0.cosh()) * (y1 - y0) / p[0].sinh();
        }
        // (disk point, area density in chart coordinates)
        let point = |x: f64, y: f64| -> (C, f64) {
            if k == 0 {
                let z = C::new(x, y);
                (z, disk_density(z))
            } else {
                let e2 = (2.0 * x).exp();
                (C::from_polar(x.exp(), y), 4.0 * e2 / (1.0 - e2).powi(2))
            }
        };
        let (_, node_density) = point(p[0], p[1]);
        let (dx, dy) = ((x1 - x0) / SUBSAMPLES as f64, (y1 - y0) / SUBSAMPLES as f64);
        let mut total = 0.0;
        for a in 0..SUBSAMPLES {
            for b in 0..SUBSAMPLES {
                let (z, density) = point(x0 + (a as f64 + 0.5) * dx, y0 + (b as f64 + 0.5) * dy);
                let inside = if k == 0 {
                    z.norm() < SPLIT_RADIUS
                } else {
                    z.norm() >= SPLIT_RADIUS && in_octagon(z) && vertex_distance(z) >= CONE_RADIUS
                };
                if inside {
                    total += density * dx * dy;
                }
            }
        }
        total / node_density
    })
}
