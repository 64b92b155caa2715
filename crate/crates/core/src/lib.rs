//! Solvers and validation tools for one-dimensional scalar conservation laws
//! `u_t + H(u)_x = 0`.
//!
//! The crate bundles
//!
//! * [`problems`]: flux functions, initial data and the built-in problem catalog,
//! * [`fv`]: conservative Lax-Friedrichs and Lagrangian-Eulerian schemes,
//! * [`autodiff`]: forward jets for input derivatives and a reverse tape for
//!   parameter gradients,
//! * [`pinn`]: a physics-informed multilayer perceptron and its training loop,
//! * [`oracles`]: exact entropy solutions and an Oleinik admissibility check,
//! * [`harness`]: error metrics, CSV artifacts and reproducible experiments.

pub mod autodiff;
pub mod error;
pub mod fv;
pub mod harness;
pub mod oracles;
pub mod pinn;
pub mod problems;

pub use error::{Error, Result};
