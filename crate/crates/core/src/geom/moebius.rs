use crate::{Error, Result};
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};
use std::ops::Mul;

/// A point of the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum IdealPoint {
    Finite(C),
    Infinity,
}

impl IdealPoint {
    pub fn finite(re: f64, im: f64) -> Self {
        IdealPoint::Finite(C::new(re, im))
    }

    /// Chordal distance on the unit sphere, so ∞ needs no special casing.
    pub fn chordal_distance(&self, other: &IdealPoint) -> f64 {
        match (self, other) {
            (IdealPoint::Infinity, IdealPoint::Infinity) => 0.0,
            (IdealPoint::Finite(z), IdealPoint::Infinity) | (IdealPoint::Infinity, IdealPoint::Finite(z)) => {
                2.0 / (1.0 + z.norm_sqr()).sqrt()
            }
            (IdealPoint::Finite(z), IdealPoint::Finite(w)) => {
                2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt())
            }
        }
    }
}

/// An element of PSL₂(ℂ) stored as a unit-determinant SL₂(ℂ) representative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moebius {
    pub a: C,
    pub b: C,
    pub c: C,
    pub d: C,
}

impl Moebius {
    /// Normalizes (a, b, c, d) to determinant one.
    pub fn new(a: C, b: C, c: C, d: C) -> Result<Self> {
        let det = a * d - b * c;
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        if !det.is_finite() || det.norm() <= 1e-300 || det.norm() <= 1e-14 * scale * scale {
            return Err(Error::SingularMatrix(det.norm()));
        }
        let s = det.sqrt();
        Ok(Moebius { a: a / s, b: b / s, c: c / s, d: d / s })
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Moebius::new(C::new(a, 0.0), C::new(b, 0.0), C::new(c, 0.0), C::new(d, 0.0))
    }

    pub fn identity() -> Self {
        let one = C::new(1.0, 0.0);
        let zero = C::new(0.0, 0.0);
        Moebius { a: one, b: zero, c: zero, d: one }
    }

    pub fn diag(l: C) -> Self {
        Moebius { a: l, b: C::new(0.0, 0.0), c: C::new(0.0, 0.0), d: l.inv() }
    }

    pub fn det(&self) -> C {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> C {
        self.a + self.d
    }

    /// Inverse; exact for a unit-determinant representative.
    pub fn inverse(&self) -> Self {
        Moebius { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Composition `self ∘ other`.
    pub fn compose(&self, o: &Moebius) -> Self {
        Moebius {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    /// `g ∘ self ∘ g⁻¹`.
    pub fn conjugate_by(&self, g: &Moebius) -> Self {
        g.compose(self).compose(&g.inverse())
    }

    /// Re-projects onto det = 1 after accumulated roundoff.
    pub fn renormalized(&self) -> Self {
        Moebius::new(self.a, self.b, self.c, self.d).unwrap_or(*self)
    }

    pub fn entries(&self) -> [C; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Distance in PSL₂: the smaller entrywise max-norm of A−B and A+B.
    pub fn proj_distance(&self, o: &Moebius) -> f64 {
        let e1 = self.entries();
        let e2 = o.entries();
        let minus = e1.iter().zip(&e2).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
        let plus = e1.iter().zip(&e2).fold(0.0f64, |m, (x, y)| m.max((x + y).norm()));
        minus.min(plus)
    }

    pub fn proj_eq(&self, o: &Moebius, tol: f64) -> bool {
        self.proj_distance(o) <= tol
    }

    pub fn apply(&self, p: IdealPoint) -> IdealPoint {
        match p {
            IdealPoint::Infinity => {
                if self.c.norm() == 0.0 {
                    IdealPoint::Infinity
                } else {
                    IdealPoint::Finite(self.a / self.c)
                }
            }
            IdealPoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den.norm() == 0.0 {
                    IdealPoint::Infinity
                } else {
                    IdealPoint::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Fixed points on the sphere, ordered (repelling, attracting) for
    /// loxodromic elements. Parabolic elements return the same point twice.
    pub fn fixed_points(&self) -> (IdealPoint, IdealPoint) {
        let scale = self.entries().iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if self.c.norm() <= 1e-15 * scale {
            // ∞ is fixed; the other root solves (a - d) z + b = 0.
            let amd = self.a - self.d;
            if amd.norm() <= 1e-15 * scale {
                return (IdealPoint::Infinity, IdealPoint::Infinity);
            }
            let z = IdealPoint::Finite(self.b / (self.d - self.a));
            // z ↦ (a z + b)/d has derivative a/d at the finite point; ∞ attracts iff |a/d| > 1.
            return if self.a.norm() > self.d.norm() { (z, IdealPoint::Infinity) } else { (IdealPoint::Infinity, z) };
        }
        let tr = self.trace();
        let disc = (tr * tr - 4.0).sqrt();
        let z1 = (self.a - self.d + disc) / (2.0 * self.c);
        let z2 = (self.a - self.d - disc) / (2.0 * self.c);
        let deriv = |z: C| (self.c * z + self.d).powi(-2).norm();
        if deriv(z1) < deriv(z2) {
            (IdealPoint::Finite(z2), IdealPoint::Finite(z1))
        } else {
            (IdealPoint::Finite(z1), IdealPoint::Finite(z2))
        }
    }
}

impl Mul for Moebius {
    type Output = Moebius;
    fn mul(self, o: Moebius) -> Moebius {
        self.compose(&o)
    }
}

/// The map sending 0 ↦ p and ∞ ↦ q.
fn axis_frame(p: IdealPoint, q: IdealPoint) -> Result<Moebius> {
    let one = C::new(1.0, 0.0);
    let zero = C::new(0.0, 0.0);
    match (p, q) {
        (IdealPoint::Infinity, IdealPoint::Infinity) => Err(Error::DegenerateAxis),
        (IdealPoint::Finite(p), IdealPoint::Infinity) => Moebius::new(one, p, zero, one),
        (IdealPoint::Infinity, IdealPoint::Finite(q)) => Moebius::new(q, one, one, zero),
        (IdealPoint::Finite(p), IdealPoint::Finite(q)) => {
            if (p - q).norm() <= 1e-14 * (1.0 + p.norm().max(q.norm())) {
                return Err(Error::DegenerateAxis);
            }
            Moebius::new(q, p, one, one)
        }
    }
}

/// Rotation by `angle` about the geodesic oriented from `p` to `q`.
///
/// For the axis (0, ∞) this is diag(e^{iθ/2}, e^{−iθ/2}).
pub fn elliptic_about_axis(p: IdealPoint, q: IdealPoint, angle: f64) -> Result<Moebius> {
    let frame = axis_frame(p, q)?;
    let rot = Moebius::diag(C::from_polar(1.0, 0.5 * angle));
    Ok(rot.conjugate_by(&frame).renormalized())
}

/// Conjugacy class of a PSL₂(ℂ) element read off its trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Classification {
    Identity,
    Elliptic {
        angle: f64,
    },
    Parabolic,
    /// Translation length; the imaginary part is the rotation of a loxodromic.
    Hyperbolic {
        length: C,
    },
}

impl Classification {
    /// Compares two classifications with tolerance `tol` on the numeric data.
    pub fn approx_eq(&self, o: &Classification, tol: f64) -> bool {
        match (self, o) {
            (Classification::Identity, Classification::Identity)
            | (Classification::Parabolic, Classification::Parabolic) => true,
            (Classification::Elliptic { angle: a }, Classification::Elliptic { angle: b }) => (a - b).abs() <= tol,
            (Classification::Hyperbolic { length: a }, Classification::Hyperbolic { length: b }) => {
                let d = a - b;
                // the rotation part is only defined modulo 2π
                let im = d.im.rem_euclid(2.0 * std::f64::consts::PI);
                d.re.abs() <= tol && (im <= tol || 2.0 * std::f64::consts::PI - im <= tol)
            }
            _ => false,
        }
    }
}

/// Classifies a normalized map with the default tolerance 1e−10.
pub fn classify(m: &Moebius) -> Classification {
    classify_with_tol(m, 1e-10)
}

pub fn classify_with_tol(m: &Moebius, tol: f64) -> Classification {
    let tr = m.trace();
    let tr2 = tr * tr;
    if (tr2 - 4.0).norm() <= tol * 4.0 {
        let scale = m.entries().iter().fold(0.0f64, |s, z| s.max(z.norm()));
        let sign = if tr.re >= 0.0 { 1.0 } else { -1.0 };
        let off = (m.a - sign).norm().max((m.d - sign).norm()).max(m.b.norm()).max(m.c.norm());
        return if off <= tol * scale.max(1.0) * 10.0 { Classification::Identity } else { Classification::Parabolic };
    }
    if tr2.im.abs() <= tol * (1.0 + tr2.norm()) {
        let t = tr2.re;
        if (0.0..4.0).contains(&t) || t < 0.0 && t > -tol {
            let half = (t.max(0.0).sqrt() / 2.0).min(1.0);
            return Classification::Elliptic { angle: 2.0 * half.acos() };
        }
        if t > 4.0 {
            let half = t.sqrt() / 2.0;
            return Classification::Hyperbolic { length: C::new(2.0 * half.acosh(), 0.0) };
        }
    }
    // tr = 2 cosh(L/2) with Re L > 0
    let mut l = (tr / 2.0).acosh() * 2.0;
    if l.re < 0.0 {
        l = -l;
    }
    Classification::Hyperbolic { length: l }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn normalization_has_unit_det() {
        let m = Moebius::new(c(2.0, 1.0), c(0.5, 0.0), c(1.0, -1.0), c(3.0, 0.2)).unwrap();
        assert!((m.det() - 1.0).norm() <= 1e-12);
        assert!(Moebius::new(c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)).is_err());
    }

    #[test]
    fn elliptic_normal_form() {
        let theta = 0.7;
        let r = elliptic_about_axis(IdealPoint::finite(0.0, 0.0), IdealPoint::Infinity, theta).unwrap();
        let expected = Moebius::diag(C::from_polar(1.0, theta / 2.0));
        assert!(r.proj_eq(&expected, 1e-14));
        assert!((r.trace() - 2.0 * (theta / 2.0).cos()).norm() < 1e-12);
    }

    #[test]
    fn full_turn_is_identity() {
        let r = elliptic_about_axis(IdealPoint::finite(0.0, 0.0), IdealPoint::Infinity, 2.0 * PI).unwrap();
        assert!(r.proj_eq(&Moebius::identity(), 1e-14));
        assert!((r.trace().norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn elliptic_fixes_axis_endpoints() {
        let p = IdealPoint::finite(-1.0, 0.0);
        let q = IdealPoint::finite(1.0, 0.0);
        let r = elliptic_about_axis(p, q, PI / 2.0).unwrap();
        assert!(r.apply(p).chordal_distance(&p) < 1e-14);
        assert!(r.apply(q).chordal_distance(&q) < 1e-14);
        // conjugation oracle M R M⁻¹ with M: 0 ↦ −1, ∞ ↦ 1
        let m = Moebius::new(c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        let oracle = Moebius::diag(C::from_polar(1.0, PI / 4.0)).conjugate_by(&m);
        assert!(r.proj_eq(&oracle, 1e-14));
        assert!((r.trace().norm() - 2.0 * (PI / 4.0).cos()).abs() < 1e-10);
    }

    #[test]
    fn elliptic_with_infinite_start() {
        let p = IdealPoint::Infinity;
        let q = IdealPoint::finite(0.3, -2.0);
        let r = elliptic_about_axis(p, q, 1.1).unwrap();
        assert!(r.apply(p).chordal_distance(&p) < 1e-12);
        assert!(r.apply(q).chordal_distance(&q) < 1e-12);
        assert!((r.trace().norm() - 2.0 * (0.55f64).cos().abs()).abs() < 1e-10);
    }

    #[test]
    fn degenerate_axis_rejected() {
        let p = IdealPoint::finite(1.0, 1.0);
        assert!(matches!(elliptic_about_axis(p, p, 1.0), Err(Error::DegenerateAxis)));
        assert!(elliptic_about_axis(IdealPoint::Infinity, IdealPoint::Infinity, 1.0).is_err());
    }

    #[test]
    fn classify_examples() {
        let e = Moebius::diag(C::from_polar(1.0, PI / 6.0));
        match classify(&e) {
            Classification::Elliptic { angle } => assert!((angle - PI / 3.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        let p = Moebius::from_real(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(classify(&p), Classification::Parabolic);
        assert_eq!(classify(&Moebius::identity()), Classification::Identity);
        let h = Moebius::from_real(2.0, 0.0, 0.0, 0.5).unwrap();
        match classify(&h) {
            Classification::Hyperbolic { length } => {
                assert!((length.re - 2.0 * 2f64.ln()).abs() < 1e-12 && length.im.abs() < 1e-12)
            }
            other => panic!("{other:?}"),
        }
        let lox = Moebius::diag(C::from_polar(2.0, 0.3));
        match classify(&lox) {
            Classification::Hyperbolic { length } => {
                assert!((length.re - 2.0 * 2f64.ln()).abs() < 1e-12);
                assert!((length.im - 0.6).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fixed_points_order() {
        let h = Moebius::from_real(2.0, 0.0, 0.0, 0.5).unwrap();
        let (rep, att) = h.fixed_points();
        assert_eq!(att, IdealPoint::Infinity);
        assert_eq!(rep, IdealPoint::finite(0.0, 0.0));
        let g = Moebius::new(c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        let hg = h.conjugate_by(&g);
        let (rep, att) = hg.fixed_points();
        assert!(rep.chordal_distance(&g.apply(IdealPoint::finite(0.0, 0.0))) < 1e-12);
        assert!(att.chordal_distance(&g.apply(IdealPoint::Infinity)) < 1e-12);
    }
}
