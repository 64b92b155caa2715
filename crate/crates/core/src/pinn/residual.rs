//! Point-wise residual and the scalar-tape route to loss gradients.
//!
//! Everything here evaluates one point at a time. Training uses the batched
//! kernels in [`super::batch`]; this path is the independent reference they
//! are checked against.

use crate::autodiff::{Jet, Scalar, Tape};
use crate::problems::FluxKind;

use super::mlp::{jet_forward, MlpParams};

/// `H'(u)` for any [`Scalar`].
pub fn flux_speed<S: Scalar>(flux: &FluxKind, u: S) -> S {
    match *flux {
        FluxKind::Burgers => u,
        FluxKind::BuckleyLeverett { a } => {
            let w = -u + 1.0;
            let den = u * u + w * w * a;
            u * w * (2.0 * a) / (den * den)
        }
    }
}

/// `f = u_t + H'(u) u_x - viscosity * u_xx` from a jet of the network output.
pub fn residual_of_jet<S: Scalar>(jet: &Jet<S>, flux: &FluxKind, viscosity: f64) -> S {
    let transport = jet.d_dt + flux_speed(flux, jet.value) * jet.d_dx;
    if viscosity == 0.0 {
        transport
    } else {
        transport - jet.d2_dx2 * viscosity
    }
}

/// PDE residual of the network at `(x, t)`.
pub fn residual_f(params: &MlpParams, flux: &FluxKind, viscosity: f64, x: f64, t: f64) -> f64 {
    residual_of_jet(&params.dual_propagate(x, t), flux, viscosity)
}

/// `L_f + L_u` and its gradient with every operation recorded on a scalar
/// [`Tape`]. Cost grows with the tape length, so keep networks small.
pub fn taped_loss_gradient(
    params: &MlpParams,
    flux: &FluxKind,
    viscosity: f64,
    interior: &[(f64, f64)],
    initial: &[(f64, f64)],
) -> (f64, Vec<f64>) {
    let tape = Tape::new();
    let vars: Vec<_> = params.as_slice().iter().map(|&v| tape.var(v)).collect();
    let sizes = params.layer_sizes();
    let bounds = params.bounds();

    let mean_square = |terms: Vec<_>| {
        let n = terms.len() as f64;
        terms
            .into_iter()
            .reduce(|acc, term| acc + term)
            .map(|sum| sum * (1.0 / n))
    };
    let residual_terms = interior
        .iter()
        .map(|&(x, t)| {
            let f = residual_of_jet(&jet_forward(sizes, bounds, &vars, x, t), flux, viscosity);
            f * f
        })
        .collect();
    let initial_terms = initial
        .iter()
        .map(|&(x, u0)| {
            let d = jet_forward(sizes, bounds, &vars, x, 0.0).value + (-u0);
            d * d
        })
        .collect();
    let loss = match (mean_square(residual_terms), mean_square(initial_terms)) {
        (Some(a), Some(b)) => a + b,
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => return (0.0, vec![0.0; params.len()]),
    };
    let grads = tape.gradient(&loss);
    (loss.value(), vars.iter().map(|v| grads[v]).collect())
}
