use num_complex::Complex64 as C;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value and first three complex derivatives of a holomorphic function at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet3 {
    pub d: [C; 4],
}

impl Jet3 {
    /// The coordinate function at `z`.
    pub fn variable(z: C) -> Self {
        Jet3 { d: [z, C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)] }
    }

    pub fn constant(c: C) -> Self {
        let zero = C::new(0.0, 0.0);
        Jet3 { d: [c, zero, zero, zero] }
    }

    pub fn value(&self) -> C {
        self.d[0]
    }

    /// Applies an outer function given by its value and derivatives h, h′, h″, h‴ at `self.value()`.
    pub fn chain(&self, h: [C; 4]) -> Jet3 {
        let [_, f1, f2, f3] = self.d;
        Jet3 {
            d: [h[0], h[1] * f1, h[2] * f1 * f1 + h[1] * f2, h[3] * f1 * f1 * f1 + 3.0 * h[2] * f1 * f2 + h[1] * f3],
        }
    }

    /// Jet of `outer ∘ self`, with `outer` the jet of the outer map at `self.value()`.
    pub fn compose_into(&self, outer: &Jet3) -> Jet3 {
        self.chain(outer.d)
    }

    pub fn recip(&self) -> Jet3 {
        let w = self.d[0];
        let i1 = w.inv();
        let i2 = i1 * i1;
        self.chain([i1, -i2, 2.0 * i2 * i1, -6.0 * i2 * i2])
    }

    pub fn exp(&self) -> Jet3 {
        let e = self.d[0].exp();
        self.chain([e, e, e, e])
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Jet3 {
        let w = self.d[0];
        let i1 = w.inv();
        self.chain([w.ln(), i1, -i1 * i1, 2.0 * i1 * i1 * i1])
    }

    /// Principal power w^a.
    pub fn powc(&self, a: C) -> Jet3 {
        let w = self.d[0];
        let p = w.powc(a);
        let i1 = w.inv();
        let one = C::new(1.0, 0.0);
        let two = C::new(2.0, 0.0);
        self.chain([p, a * p * i1, a * (a - one) * p * i1 * i1, a * (a - one) * (a - two) * p * i1 * i1 * i1])
    }

    pub fn powf(&self, a: f64) -> Jet3 {
        self.powc(C::new(a, 0.0))
    }

    pub fn scale(&self, c: C) -> Jet3 {
        Jet3 { d: self.d.map(|x| x * c) }
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(self, o: Jet3) -> Jet3 {
        Jet3 { d: [self.d[0] + o.d[0], self.d[1] + o.d[1], self.d[2] + o.d[2], self.d[3] + o.d[3]] }
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, o: Jet3) -> Jet3 {
        self + (-o)
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        Jet3 { d: self.d.map(|x| -x) }
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, o: Jet3) -> Jet3 {
        let [f0, f1, f2, f3] = self.d;
        let [g0, g1, g2, g3] = o.d;
        Jet3 {
            d: [
                f0 * g0,
                f1 * g0 + f0 * g1,
                f2 * g0 + 2.0 * f1 * g1 + f0 * g2,
                f3 * g0 + 3.0 * f2 * g1 + 3.0 * f1 * g2 + f0 * g3,
            ],
        }
    }
}

impl Div for Jet3 {
    type Output = Jet3;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet3) -> Jet3 {
        self * o.recip()
    }
}

impl Add<C> for Jet3 {
    type Output = Jet3;
    fn add(self, c: C) -> Jet3 {
        let mut d = self.d;
        d[0] += c;
        Jet3 { d }
    }
}

impl Mul<C> for Jet3 {
    type Output = Jet3;
    fn mul(self, c: C) -> Jet3 {
        self.scale(c)
    }
}
