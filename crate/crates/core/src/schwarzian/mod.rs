//! Schwarzian derivatives of holomorphic germs and their behaviour at cone points.
//!
//! Germs expose values and, when available, exact 3-jets. Without jets the
//! derivatives come from fourth-order central differences.

mod jet;

pub use jet::Jet3;

use crate::geom::Moebius;
use crate::{Error, Result};
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default finite-difference step on unit-scale domains.
pub const FD_STEP: f64 = 1e-3;
/// |f′| at or below this counts as a critical point.
pub const CRITICAL_TOL: f64 = 1e-12;
/// Number of rings in the cone regression.
pub const RING_COUNT: usize = 5;
/// Outer ring radius; ring k has radius RING_OUTER·2^{−k}.
pub const RING_OUTER: f64 = 0.01;
/// Samples per ring.
pub const RING_SAMPLES: usize = 32;
/// Acceptance band on the fitted slope.
pub const SLOPE_BAND: f64 = 0.2;

/// Where a germ may be sampled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SampleDomain {
    Plane,
    Disk { center: [f64; 2], radius: f64 },
    Annulus { center: [f64; 2], inner: f64, outer: f64 },
}

impl SampleDomain {
    pub fn contains(&self, z: C) -> bool {
        match *self {
            SampleDomain::Plane => z.is_finite(),
            SampleDomain::Disk { center, radius } => (z - C::new(center[0], center[1])).norm() < radius,
            SampleDomain::Annulus { center, inner, outer } => {
                let r = (z - C::new(center[0], center[1])).norm();
                r > inner && r < outer
            }
        }
    }
}

/// A holomorphic map known by its values and optionally by exact 3-jets.
pub trait HolomorphicSample {
    fn value(&self, z: C) -> C;

    fn jet(&self, _z: C) -> Option<Jet3> {
        None
    }

    fn domain(&self) -> SampleDomain {
        SampleDomain::Plane
    }
}

/// A germ given by an expression generic over jets, so values and derivatives are exact.
pub struct Analytic<F: Fn(Jet3) -> Jet3> {
    pub expr: F,
    pub domain: SampleDomain,
}

impl<F: Fn(Jet3) -> Jet3> Analytic<F> {
    pub fn new(expr: F) -> Self {
        Analytic { expr, domain: SampleDomain::Plane }
    }
}

impl<F: Fn(Jet3) -> Jet3> HolomorphicSample for Analytic<F> {
    fn value(&self, z: C) -> C {
        (self.expr)(Jet3::variable(z)).value()
    }
    fn jet(&self, z: C) -> Option<Jet3> {
        Some((self.expr)(Jet3::variable(z)))
    }
    fn domain(&self) -> SampleDomain {
        self.domain
    }
}

/// A germ known only by values; derivatives come from finite differences.
pub struct ValuesOnly<F: Fn(C) -> C> {
    pub f: F,
    pub domain: SampleDomain,
}

impl<F: Fn(C) -> C> ValuesOnly<F> {
    pub fn new(f: F) -> Self {
        ValuesOnly { f, domain: SampleDomain::Plane }
    }
}

impl<F: Fn(C) -> C> HolomorphicSample for ValuesOnly<F> {
    fn value(&self, z: C) -> C {
        (self.f)(z)
    }
    fn domain(&self) -> SampleDomain {
        self.domain
    }
}

impl HolomorphicSample for Moebius {
    fn value(&self, z: C) -> C {
        (self.a * z + self.b) / (self.c * z + self.d)
    }
    fn jet(&self, z: C) -> Option<Jet3> {
        let x = Jet3::variable(z);
        Some((x * self.a + self.b) / (x * self.c + self.d))
    }
}

/// Polynomial with coefficients in increasing degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial(pub Vec<C>);

impl HolomorphicSample for Polynomial {
    fn value(&self, z: C) -> C {
        self.0.iter().rev().fold(C::new(0.0, 0.0), |acc, c| acc * z + c)
    }
    fn jet(&self, z: C) -> Option<Jet3> {
        let x = Jet3::variable(z);
        Some(self.0.iter().rev().fold(Jet3::constant(C::new(0.0, 0.0)), |acc, c| acc * x + *c))
    }
}

/// The composition outer ∘ inner.
pub struct Composition<'a> {
    pub inner: &'a dyn HolomorphicSample,
    pub outer: &'a dyn HolomorphicSample,
}

impl HolomorphicSample for Composition<'_> {
    fn value(&self, z: C) -> C {
        self.outer.value(self.inner.value(z))
    }
    fn jet(&self, z: C) -> Option<Jet3> {
        let inner = self.inner.jet(z)?;
        let outer = self.outer.jet(inner.value())?;
        Some(inner.compose_into(&outer))
    }
    fn domain(&self) -> SampleDomain {
        self.inner.domain()
    }
}

/// Fourth-order central differences for f′, f″ and f‴ with step `h`.
pub fn fd_jet(f: &dyn HolomorphicSample, z: C, h: f64) -> Jet3 {
    let at = |k: f64| f.value(z + k * h);
    let (m3, m2, m1, f0, p1, p2, p3) = (at(-3.0), at(-2.0), at(-1.0), at(0.0), at(1.0), at(2.0), at(3.0));
    let d1 = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
    let d2 = (-p2 + 16.0 * p1 - 30.0 * f0 + 16.0 * m1 - m2) / (12.0 * h * h);
    let d3 = (-p3 + 8.0 * p2 - 13.0 * p1 + 13.0 * m1 - 8.0 * m2 + m3) / (8.0 * h * h * h);
    Jet3 { d: [f0, d1, d2, d3] }
}

/// Exact jet when the germ provides one, else finite differences with step `FD_STEP`.
pub fn jet_of(f: &dyn HolomorphicSample, z: C) -> Jet3 {
    f.jet(z).unwrap_or_else(|| fd_jet(f, z, FD_STEP))
}

/// S(f) = f‴/f′ − (3/2)(f″/f′)² read from a jet.
pub fn schwarzian_of_jet(j: &Jet3, z: C) -> Result<C> {
    let [_, f1, f2, f3] = j.d;
    if f1.norm() <= CRITICAL_TOL || !f1.is_finite() {
        return Err(Error::CriticalPoint(z));
    }
    let r = f2 / f1;
    Ok(f3 / f1 - 1.5 * r * r)
}

/// Schwarzian derivative at `z`, the coefficient of dz².
pub fn schwarzian(f: &dyn HolomorphicSample, z: C) -> Result<C> {
    schwarzian_of_jet(&jet_of(f, z), z)
}

/// Schwarzian from finite differences with an explicit step, ignoring any exact jet.
pub fn schwarzian_fd(f: &dyn HolomorphicSample, z: C, h: f64) -> Result<C> {
    schwarzian_of_jet(&fd_jet(f, z, h), z)
}

/// |S(g∘f)(z) − S(f)(z) − S(g)(f(z))·f′(z)²|.
pub fn cocycle_check(f: &dyn HolomorphicSample, g: &dyn HolomorphicSample, z: C) -> Result<f64> {
    let jf = jet_of(f, z);
    let composed = Composition { inner: f, outer: g };
    let lhs = schwarzian(&composed, z)?;
    let sf = schwarzian_of_jet(&jf, z)?;
    let sg = schwarzian(g, jf.value())?;
    Ok((lhs - sf - sg * jf.d[1] * jf.d[1]).norm())
}

/// Discrete Cauchy–Riemann residual |∂_y f − i ∂_x f| with centred differences of step `h`.
pub fn cauchy_riemann_residual(f: &dyn HolomorphicSample, z: C, h: f64) -> f64 {
    let i = C::new(0.0, 1.0);
    let dx = (f.value(z + h) - f.value(z - h)) / (2.0 * h);
    let dy = (f.value(z + i * h) - f.value(z - i * h)) / (2.0 * h);
    (dy - i * dx).norm()
}

/// Pole report for the Schwarzian of the cone-adapted germ, read in the z-coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeExpansionReport {
    /// Nearest integer to minus the fitted slope; 0 for a vanishing Schwarzian.
    pub pole_order: u32,
    /// Least-squares slope of log sup|Q| against log r over the rings.
    pub slope: f64,
    pub slope_band: f64,
    /// Estimate of b₁ in Q = (θ/2π)²·(b₁ + b₂z + …)/z.
    pub leading_coeff: [f64; 2],
    /// Whether the u-coordinate Schwarzian times (θ/2π)²·z^{2θ/2π − 2} matches Q on every sample.
    pub scale_check: bool,
    /// Ring radii, outermost first.
    #[serde(skip)]
    pub radii: Vec<f64>,
    /// sup |Q| on each ring.
    #[serde(skip)]
    pub ring_sup: Vec<f64>,
}

impl ConeExpansionReport {
    /// Whether the slope lies within the band around `expected`.
    pub fn slope_near(&self, expected: f64) -> bool {
        (self.slope - expected).abs() <= self.slope_band
    }

    /// sup|Q|·r² decreases toward the centre, so there is no double pole.
    pub fn no_double_pole(&self) -> bool {
        let w: Vec<f64> = self.radii.iter().zip(&self.ring_sup).map(|(r, s)| s * r * r).collect();
        w.windows(2).all(|p| p[1] <= p[0] * (1.0 + 1e-9) + 1e-300)
    }

    /// sup|Q|·r stays within a factor 4 of its outer-ring value.
    pub fn simple_pole_bounded(&self) -> bool {
        let w: Vec<f64> = self.radii.iter().zip(&self.ring_sup).map(|(r, s)| s * r).collect();
        w.iter().all(|v| *v <= 4.0 * w[0] + 1e-12)
    }
}

/// Rings at which the cone regression samples.
pub fn ring_radii() -> Vec<f64> {
    (0..RING_COUNT).map(|k| RING_OUTER * 0.5f64.powi(k as i32)).collect()
}

/// Q(z) = S(f)(z) + ½(1 − κ²)(f′²/f² − 1/z²) with κ = θ/2π: the Schwarzian of
/// φ(u) = f(u^{1/κ})^κ written as a quadratic differential in z = u^{1/κ}.
pub fn cone_quadratic(f: &dyn HolomorphicSample, theta: f64, z: C) -> Result<C> {
    let kappa = theta / (2.0 * PI);
    let j = jet_of(f, z);
    let s = schwarzian_of_jet(&j, z)?;
    let log_deriv = j.d[1] / j.d[0];
    let zi = z.inv();
    // f′/f − 1/z is regular, so expand the difference of squares to avoid cancellation
    let diff = (log_deriv - zi) * (log_deriv + zi);
    Ok(s + 0.5 * (1.0 - kappa * kappa) * diff)
}

/// Schwarzian of φ(u) = f(u^{1/κ})^κ in the u-coordinate at u = z^κ.
fn cone_schwarzian_u(f: &dyn HolomorphicSample, kappa: f64, z: C) -> Result<C> {
    let u = z.powf(kappa);
    let phi_jet = match f.jet(z) {
        Some(_) => {
            let to_z = Jet3::variable(u).powf(1.0 / kappa);
            let fz = f.jet(to_z.value()).expect("jet available");
            to_z.compose_into(&fz).powf(kappa)
        }
        None => {
            let phi = ValuesOnly::new(|w: C| f.value(w.powf(1.0 / kappa)).powf(kappa));
            fd_jet(&phi, u, FD_STEP.min(0.1 * u.norm()))
        }
    };
    schwarzian_of_jet(&phi_jet, u)
}

/// Ring regression of the Schwarzian of the cone-adapted germ φ(u) = f(u^{2π/θ})^{θ/2π}.
pub fn cone_schwarzian_expansion(f: &dyn HolomorphicSample, theta: f64) -> Result<ConeExpansionReport> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::Domain(format!("cone angle {theta} outside (0, π)")));
    }
    let zero = C::new(0.0, 0.0);
    let j0 = jet_of(f, zero);
    if j0.value().norm() > CRITICAL_TOL {
        return Err(Error::InvalidGerm(format!("f(0) = {} is not 0", j0.value())));
    }
    if j0.d[1].norm() <= CRITICAL_TOL {
        return Err(Error::InvalidGerm("f′(0) = 0".into()));
    }
    let kappa = theta / (2.0 * PI);
    let radii = ring_radii();
    let mut ring_sup = Vec::with_capacity(RING_COUNT);
    let mut innermost_mean = zero;
    let mut scale_check = true;
    for (k, r) in radii.iter().enumerate() {
        let mut sup = 0.0f64;
        let mut mean = zero;
        for m in 0..RING_SAMPLES {
            // half-step offset keeps samples off the branch cut along the negative axis
            let angle = -PI + (m as f64 + 0.5) * 2.0 * PI / RING_SAMPLES as f64;
            let z = C::from_polar(*r, angle);
            let q = cone_quadratic(f, theta, z)?;
            sup = sup.max(q.norm());
            mean += z * q;
            let su = cone_schwarzian_u(f, kappa, z)?;
            let pulled = su * kappa * kappa * z.powf(2.0 * kappa - 2.0);
            if (pulled - q).norm() > 1e-6 * (1.0 + q.norm()) {
                scale_check = false;
            }
        }
        ring_sup.push(sup);
        if k + 1 == RING_COUNT {
            innermost_mean = mean / RING_SAMPLES as f64;
        }
    }
    let vanishing = radii.iter().zip(&ring_sup).all(|(r, s)| s * r <= 1e-10);
    let slope = if vanishing {
        0.0
    } else {
        let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
        let ys: Vec<f64> = ring_sup.iter().map(|s| s.max(1e-300).ln()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        sxy / sxx
    };
    let pole_order = (-slope).round().max(0.0) as u32;
    let b1 = if vanishing { zero } else { innermost_mean / (kappa * kappa) };
    Ok(ConeExpansionReport {
        pole_order,
        slope,
        slope_band: SLOPE_BAND,
        leading_coeff: [b1.re, b1.im],
        scale_check,
        radii,
        ring_sup,
    })
}
