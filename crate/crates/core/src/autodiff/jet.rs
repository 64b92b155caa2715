use std::ops::{Add, Mul, Sub};

use super::Scalar;

/// Truncated Taylor jet in two inputs `(x, t)` tracking
/// `(f, f_x, f_t, f_xx)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<S = f64> {
    pub value: S,
    pub d_dx: S,
    pub d_dt: S,
    pub d2_dx2: S,
}

impl<S: Scalar> Jet<S> {
    pub fn constant(value: S) -> Self {
        let zero = value.constant_like(0.0);
        Jet {
            value,
            d_dx: zero,
            d_dt: zero,
            d2_dx2: zero,
        }
    }

    /// Seed for an affine function of `x` alone: `value + slope * (. - x)`.
    pub fn seed_x(value: S, slope: f64) -> Self {
        let zero = value.constant_like(0.0);
        Jet {
            value,
            d_dx: value.constant_like(slope),
            d_dt: zero,
            d2_dx2: zero,
        }
    }

    /// Seed for an affine function of `t` alone.
    pub fn seed_t(value: S, slope: f64) -> Self {
        let zero = value.constant_like(0.0);
        Jet {
            value,
            d_dx: zero,
            d_dt: value.constant_like(slope),
            d2_dx2: zero,
        }
    }

    /// Multiplication by a quantity that does not depend on `(x, t)`.
    pub fn scale(self, c: S) -> Self {
        Jet {
            value: self.value * c,
            d_dx: self.d_dx * c,
            d_dt: self.d_dt * c,
            d2_dx2: self.d2_dx2 * c,
        }
    }

    /// Adds a quantity that does not depend on `(x, t)`.
    pub fn shift(self, c: S) -> Self {
        Jet {
            value: self.value + c,
            ..self
        }
    }

    pub fn tanh(self) -> Self {
        let y = self.value.tanh();
        let slope = -(y * y) + 1.0;
        Jet {
            value: y,
            d_dx: slope * self.d_dx,
            d_dt: slope * self.d_dt,
            d2_dx2: slope * self.d2_dx2 - y * slope * self.d_dx * self.d_dx * 2.0,
        }
    }
}

impl<S: Scalar> Add for Jet<S> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Jet {
            value: self.value + rhs.value,
            d_dx: self.d_dx + rhs.d_dx,
            d_dt: self.d_dt + rhs.d_dt,
            d2_dx2: self.d2_dx2 + rhs.d2_dx2,
        }
    }
}

impl<S: Scalar> Sub for Jet<S> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Jet {
            value: self.value - rhs.value,
            d_dx: self.d_dx - rhs.d_dx,
            d_dt: self.d_dt - rhs.d_dt,
            d2_dx2: self.d2_dx2 - rhs.d2_dx2,
        }
    }
}

impl<S: Scalar> Mul for Jet<S> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        Jet {
            value: self.value * rhs.value,
            d_dx: self.d_dx * rhs.value + self.value * rhs.d_dx,
            d_dt: self.d_dt * rhs.value + self.value * rhs.d_dt,
            d2_dx2: self.d2_dx2 * rhs.value
                + self.d_dx * rhs.d_dx * 2.0
                + self.value * rhs.d2_dx2,
        }
    }
}
