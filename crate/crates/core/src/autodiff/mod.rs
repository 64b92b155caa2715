//! Automatic differentiation.
//!
//! Input derivatives of the network (`u_x`, `u_t`, `u_xx`) are propagated
//! forward with [`Jet`]s. Parameter gradients of a loss built from those
//! channels come from reverse accumulation on a [`Tape`]. Because [`Jet`] is
//! generic over [`Scalar`], a jet of tape variables carries parameter
//! sensitivities through every derivative channel.

mod jet;
mod tape;

pub use jet::Jet;
pub use tape::{Gradients, Tape, Var};

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Real-like values the network can be evaluated on.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Mul<f64, Output = Self>
{
    /// A constant living in the same context as `self`.
    fn constant_like(&self, value: f64) -> Self;

    fn tanh(self) -> Self;

    fn value(&self) -> f64;
}

impl Scalar for f64 {
    fn constant_like(&self, value: f64) -> Self {
        value
    }

    fn tanh(self) -> Self {
        f64::tanh(self)
    }

    fn value(&self) -> f64 {
        *self
    }
}
