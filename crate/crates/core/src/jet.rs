//! Second-order jets: truncated Taylor data `(f, f', f'')` in one variable.
//!
//! Radial charts carry their warp factors and lapse as jet-evaluable maps, so
//! curvature and Hessians come out of closed-form algebra on exact
//! derivatives rather than finite differencing. Finite differences appear in
//! this crate only inside tests, as an independent check of this module.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    /// Value.
    pub v: f64,
    /// First derivative.
    pub d: f64,
    /// Second derivative.
    pub dd: f64,
}

impl Jet {
    pub const fn constant(v: f64) -> Self {
        Jet { v, d: 0.0, dd: 0.0 }
    }

    /// The coordinate itself: value `x`, slope 1, curvature 0.
    pub const fn variable(x: f64) -> Self {
        Jet { v: x, d: 1.0, dd: 0.0 }
    }

    pub fn recip(self) -> Self {
        let iv = 1.0 / self.v;
        Jet {
            v: iv,
            d: -self.d * iv * iv,
            dd: (2.0 * self.d * self.d * iv - self.dd) * iv * iv,
        }
    }

    pub fn powf(self, p: f64) -> Self {
        let vp = self.v.powf(p);
        let vp1 = p * self.v.powf(p - 1.0);
        Jet {
            v: vp,
            d: vp1 * self.d,
            dd: p * (p - 1.0) * self.v.powf(p - 2.0) * self.d * self.d + vp1 * self.dd,
        }
    }

    pub fn powi(self, k: i32) -> Self {
        self.powf(k as f64)
    }

    pub fn sqrt(self) -> Self {
        self.powf(0.5)
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        Jet {
            v: e,
            d: e * self.d,
            dd: e * (self.d * self.d + self.dd),
        }
    }

    pub fn ln(self) -> Self {
        Jet {
            v: self.v.ln(),
            d: self.d / self.v,
            dd: self.dd / self.v - self.d * self.d / (self.v * self.v),
        }
    }

    pub fn sinh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        Jet {
            v: s,
            d: c * self.d,
            dd: s * self.d * self.d + c * self.dd,
        }
    }

    pub fn cosh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        Jet {
            v: c,
            d: s * self.d,
            dd: c * self.d * self.d + s * self.dd,
        }
    }

    pub fn tanh(self) -> Self {
        let t = self.v.tanh();
        let sech2 = 1.0 - t * t;
        Jet {
            v: t,
            d: sech2 * self.d,
            dd: sech2 * self.dd - 2.0 * t * sech2 * self.d * self.d,
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet {
            v: self.v + o.v,
            d: self.d + o.d,
            dd: self.dd + o.dd,
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet {
            v: self.v - o.v,
            d: self.d - o.d,
            dd: self.dd - o.dd,
        }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d: self.d * o.v + self.v * o.d,
            dd: self.dd * o.v + 2.0 * self.d * o.d + self.v * o.dd,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            v: -self.v,
            d: -self.d,
            dd: -self.dd,
        }
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        Jet {
            v: self.v * s,
            d: self.d * s,
            dd: self.dd * s,
        }
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, s: f64) -> Jet {
        Jet {
            v: self.v + s,
            ..self
        }
    }
}

/// A scalar profile of one radial variable, evaluable as a second-order jet.
pub struct RadialFn(Box<dyn Fn(Jet) -> Jet + Send + Sync>);

impl RadialFn {
    pub fn new(f: impl Fn(Jet) -> Jet + Send + Sync + 'static) -> Self {
        RadialFn(Box::new(f))
    }

    pub fn constant(c: f64) -> Self {
        RadialFn::new(move |_| Jet::constant(c))
    }

    /// Jet of the profile at coordinate value `x`.
    pub fn jet(&self, x: f64) -> Jet {
        (self.0)(Jet::variable(x))
    }

    pub fn value(&self, x: f64) -> f64 {
        self.jet(x).v
    }

    /// Compose with an inner map given as jets (chain rule handled by jet
    /// arithmetic itself).
    pub fn eval_jet(&self, inner: Jet) -> Jet {
        (self.0)(inner)
    }
}

impl std::fmt::Debug for RadialFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("RadialFn(..)")
    }
}
