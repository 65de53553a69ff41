//! Hyper-dual numbers: reals extended by up to [`MAX_UNITS`] nilpotent units `ε_a`
//! with `ε_a² = 0`, used to evaluate mixed directional derivatives exactly.

use std::ops::{Add, Mul, Neg, Sub};

pub const MAX_UNITS: usize = 4;
const SIZE: usize = 1 << MAX_UNITS;
const INV_FACTORIAL: [f64; MAX_UNITS + 1] = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];

/// Arithmetic needed by analytic vector fields; implemented for `f64` and
/// [`HyperDual`].
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Mul<f64, Output = Self>
{
    /// The constant `x` in the same number system as `self`.
    fn lift(&self, x: f64) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn recip(self) -> Self;

    fn sigmoid(self) -> Self {
        ((-self).exp() + 1.0).recip()
    }
}

impl Scalar for f64 {
    fn lift(&self, x: f64) -> Self {
        x
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn recip(self) -> Self {
        1.0 / self
    }
}

/// `Σ_S c_S ε^S` over subsets `S` of the first `units` units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperDual {
    c: [f64; SIZE],
    units: usize,
}

impl HyperDual {
    pub fn constant(x: f64, units: usize) -> Self {
        assert!(units <= MAX_UNITS, "at most {MAX_UNITS} nilpotent units");
        let mut c = [0.0; SIZE];
        c[0] = x;
        Self { c, units }
    }

    pub fn units(&self) -> usize {
        self.units
    }

    pub fn real(&self) -> f64 {
        self.c[0]
    }

    /// Coefficient of `Π_{a ∈ mask} ε_a`.
    pub fn coefficient(&self, mask: usize) -> f64 {
        self.c[mask]
    }

    /// `ε_unit · self`.
    pub fn times_unit(&self, unit: usize) -> Self {
        assert!(unit < self.units, "unit {unit} out of range");
        let bit = 1 << unit;
        let mut c = [0.0; SIZE];
        for s in 0..(1 << self.units) {
            if s & bit != 0 {
                c[s] = self.c[s ^ bit];
            }
        }
        Self { c, units: self.units }
    }

    /// `f(self)` from the values `f^{(m)}(real)`, `m = 0..=units`.
    fn apply(self, derivs: [f64; MAX_UNITS + 1]) -> Self {
        let mut nil = self;
        nil.c[0] = 0.0;
        let mut acc = Self::constant(derivs[0], self.units);
        let mut pow = Self::constant(1.0, self.units);
        for m in 1..=self.units {
            pow = pow * nil;
            acc = acc + pow * (derivs[m] * INV_FACTORIAL[m]);
        }
        acc
    }
}

impl Add for HyperDual {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let units = self.units.max(o.units);
        let mut c = self.c;
        for s in 0..(1 << units) {
            c[s] += o.c[s];
        }
        Self { c, units }
    }
}

impl Sub for HyperDual {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for HyperDual {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl Mul for HyperDual {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let units = self.units.max(o.units);
        let mut c = [0.0; SIZE];
        for s in 0..(1usize << units) {
            let mut acc = 0.0;
            let mut t = s;
            loop {
                acc += self.c[t] * o.c[s ^ t];
                if t == 0 {
                    break;
                }
                t = (t - 1) & s;
            }
            c[s] = acc;
        }
        Self { c, units }
    }
}

impl Add<f64> for HyperDual {
    type Output = Self;
    fn add(mut self, x: f64) -> Self {
        self.c[0] += x;
        self
    }
}

impl Mul<f64> for HyperDual {
    type Output = Self;
    fn mul(mut self, x: f64) -> Self {
        self.c.iter_mut().for_each(|v| *v *= x);
        self
    }
}

impl Scalar for HyperDual {
    fn lift(&self, x: f64) -> Self {
        Self::constant(x, self.units)
    }

    fn sin(self) -> Self {
        let (s, c) = self.real().sin_cos();
        self.apply([s, c, -s, -c, s])
    }

    fn cos(self) -> Self {
        let (s, c) = self.real().sin_cos();
        self.apply([c, -s, -c, s, c])
    }

    fn exp(self) -> Self {
        let e = self.real().exp();
        self.apply([e; MAX_UNITS + 1])
    }

    fn recip(self) -> Self {
        let r = 1.0 / self.real();
        let (r2, r3) = (r * r, r * r * r);
        self.apply([r, -r2, 2.0 * r3, -6.0 * r3 * r, 24.0 * r3 * r2])
    }
}
