//! Fixed-size 2×2 real matrices used for per-sample tensor components.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// A 2×2 real matrix, row-major. Used for (1,1)-tensors in chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Mat2(pub [[f64; 2]; 2]);

/// Components (xx, xy, yy) of a symmetric (0,2)-tensor.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Sym2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn diag(a: f64, d: f64) -> Self {
        Mat2([[a, 0.0], [0.0, d]])
    }

    pub fn scalar(s: f64) -> Self {
        Mat2::diag(s, s)
    }

    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn transpose(&self) -> Self {
        Mat2([[self.0[0][0], self.0[1][0]], [self.0[0][1], self.0[1][1]]])
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let m = &self.0;
        Some(Mat2([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]))
    }

    pub fn scale(&self, s: f64) -> Self {
        Mat2([[self.0[0][0] * s, self.0[0][1] * s], [self.0[1][0] * s, self.0[1][1] * s]])
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Eigenvalues (λ ≥ μ) from trace and determinant; complex pairs are
    /// collapsed onto their real part.
    pub fn real_eigenvalues(&self) -> (f64, f64) {
        let t = 0.5 * self.trace();
        let disc = (t * t - self.det()).max(0.0).sqrt();
        (t + disc, t - disc)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [self.0[0][0] * v[0] + self.0[0][1] * v[1], self.0[1][0] * v[0] + self.0[1][1] * v[1]]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2([
            [self.0[0][0] + o.0[0][0], self.0[0][1] + o.0[0][1]],
            [self.0[1][0] + o.0[1][0], self.0[1][1] + o.0[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + o.scale(-1.0)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &o.0;
        Mat2([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }
}

impl Sym2 {
    pub fn new(xx: f64, xy: f64, yy: f64) -> Self {
        Sym2 { xx, xy, yy }
    }

    pub fn scalar(s: f64) -> Self {
        Sym2::new(s, 0.0, s)
    }

    pub fn to_mat(&self) -> Mat2 {
        Mat2::new(self.xx, self.xy, self.xy, self.yy)
    }

    /// Symmetric part of a matrix.
    pub fn from_mat(m: &Mat2) -> Self {
        Sym2::new(m.0[0][0], 0.5 * (m.0[0][1] + m.0[1][0]), m.0[1][1])
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    pub fn scale(&self, s: f64) -> Self {
        Sym2::new(self.xx * s, self.xy * s, self.yy * s)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.xx > 0.0 && self.det() > 0.0 && self.is_finite()
    }

    pub fn is_finite(&self) -> bool {
        self.xx.is_finite() && self.xy.is_finite() && self.yy.is_finite()
    }

    /// The bilinear form g(A·, A·), i.e. Aᵀ g A.
    pub fn pullback(&self, a: &Mat2) -> Sym2 {
        Sym2::from_mat(&(a.transpose() * self.to_mat() * *a))
    }

    /// The bilinear form g(A·, C·) symmetrised; exact when A, C commute in the
    /// g-self-adjoint sense.
    pub fn pair(&self, a: &Mat2, c: &Mat2) -> Sym2 {
        Sym2::from_mat(&(a.transpose() * self.to_mat() * *c))
    }

    pub fn inverse(&self) -> Option<Sym2> {
        self.to_mat().inverse().map(|m| Sym2::from_mat(&m))
    }

    pub fn max_abs(&self) -> f64 {
        self.xx.abs().max(self.xy.abs()).max(self.yy.abs())
    }

    pub fn quad(&self, v: [f64; 2]) -> f64 {
        self.xx * v[0] * v[0] + 2.0 * self.xy * v[0] * v[1] + self.yy * v[1] * v[1]
    }
}

impl Add for Sym2 {
    type Output = Sym2;
    fn add(self, o: Sym2) -> Sym2 {
        Sym2::new(self.xx + o.xx, self.xy + o.xy, self.yy + o.yy)
    }
}

impl Sub for Sym2 {
    type Output = Sym2;
    fn sub(self, o: Sym2) -> Sym2 {
        Sym2::new(self.xx - o.xx, self.xy - o.xy, self.yy - o.yy)
    }
}

/// Operator g⁻¹·q taking a bilinear form to the (1,1)-tensor it defines.
pub fn raise(g: &Sym2, q: &Sym2) -> Option<Mat2> {
    g.to_mat().inverse().map(|gi| gi * q.to_mat())
}

/// ‖g·A − (g·A)ᵀ‖ measured entrywise.
pub fn self_adjoint_residual(g: &Sym2, a: &Mat2) -> f64 {
    let m = g.to_mat() * *a;
    (m.0[0][1] - m.0[1][0]).abs()
}
