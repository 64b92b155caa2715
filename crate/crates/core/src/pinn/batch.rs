//! Batched loss and gradient kernels used for training.
//!
//! A chunk of points is pushed through the network as one stacked matrix
//! per layer, `[value | d/dx | d/dt | d2/dx2]` column blocks, so each layer
//! is a single matrix product. The forward pass keeps every layer's jets;
//! the reverse pass walks them backwards applying the adjoint of the affine
//! map and of the `tanh` jet rule, accumulating parameter gradients.
//!
//! Chunks are independent and run in parallel. Their partial results are
//! combined by pairwise summation in chunk order, so the result does not
//! depend on scheduling.

use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array2, ArrayView1, ArrayView2, ArrayViewMut2, Axis};
use rayon::prelude::*;

use crate::problems::FluxKind;

use super::mlp::MlpParams;

const CHUNK: usize = 256;

/// Number of stacked jet blocks carried through the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Channels {
    Value = 1,
    FirstOrder = 3,
    SecondOrder = 4,
}

/// Mean-square residual and initial-value losses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub loss_f: f64,
    pub loss_u: f64,
}

impl LossBreakdown {
    pub fn total(&self) -> f64 {
        self.loss_f + self.loss_u
    }
}

struct Trace {
    n: usize,
    channels: usize,
    /// `acts[l]` is the input of layer `l`.
    acts: Vec<Array2<f64>>,
    /// `pres[l]` is the pre-activation output of layer `l`.
    pres: Vec<Array2<f64>>,
}

fn weights(params: &MlpParams, layer: usize) -> (ArrayView2<'_, f64>, ArrayView1<'_, f64>) {
    let off = params.layer_offsets(layer);
    let flat = params.as_slice();
    let w = ArrayView2::from_shape((off.rows, off.cols), &flat[off.weights..off.bias])
        .expect("weight block matches layer shape");
    let b = ArrayView1::from(&flat[off.bias..off.bias + off.rows]);
    (w, b)
}

fn forward(params: &MlpParams, points: &[(f64, f64)], channels: Channels) -> Trace {
    let n = points.len();
    let nc = channels as usize;
    let bounds = params.bounds();
    let mut input = Array2::zeros((2, nc * n));
    for (i, &(x, t)) in points.iter().enumerate() {
        let (xi, tau) = bounds.normalize(x, t);
        input[[0, i]] = xi;
        input[[1, i]] = tau;
        if nc >= 3 {
            input[[0, n + i]] = bounds.x_scale();
            input[[1, 2 * n + i]] = bounds.t_scale();
        }
    }
    let layers = params.num_layers();
    let mut acts = Vec::with_capacity(layers);
    let mut pres = Vec::with_capacity(layers);
    acts.push(input);
    for l in 0..layers {
        let (w, b) = weights(params, l);
        let mut z = w.dot(&acts[l]);
        let mut value = z.slice_mut(s![.., 0..n]);
        value += &b.insert_axis(Axis(1));
        if l + 1 < layers {
            acts.push(tanh_jets(&z, n, nc));
        }
        pres.push(z);
    }
    Trace {
        n,
        channels: nc,
        acts,
        pres,
    }
}

/// Branch-free `tanh` accurate to a few ulp, cheaper than the libm call.
///
/// Small arguments use a rational approximation in `x^2`; larger ones use
/// `(1 - e) / (1 + e)` with `e = exp(-2|x|)` from a reduced-range polynomial.
#[inline(always)]
fn tanh_fast(x: f64) -> f64 {
    const P: [f64; 3] = [
        -9.643_991_794_250_522e-1,
        -9.928_772_310_019_186e1,
        -1.614_687_684_417_084_5e3,
    ];
    const Q: [f64; 3] = [
        1.128_116_784_916_329_3e2,
        2.235_488_390_601_004_6e3,
        4.844_063_053_251_255e3,
    ];
    let a = x.abs();
    let z = x * x;
    let p = (P[0] * z + P[1]) * z + P[2];
    let q = ((z + Q[0]) * z + Q[1]) * z + Q[2];
    let small = x + x * z * p / q;

    let y = (-2.0 * a).max(-700.0);
    let n = (y * std::f64::consts::LOG2_E).round();
    let r = (y - n * 6.931_471_803_691_238e-1) - n * 1.908_214_929_270_587_7e-10;
    let mut e = 1.0 / 479_001_600.0;
    for c in [
        1.0 / 39_916_800.0,
        1.0 / 3_628_800.0,
        1.0 / 362_880.0,
        1.0 / 40_320.0,
        1.0 / 5_040.0,
        1.0 / 720.0,
        1.0 / 120.0,
        1.0 / 24.0,
        1.0 / 6.0,
        0.5,
        1.0,
        1.0,
    ] {
        e = e * r + c;
    }
    let e = e * f64::from_bits(((n as i64 + 1023) as u64) << 52);
    let large = ((1.0 - e) / (1.0 + e)).copysign(x);
    if a < 0.625 {
        small
    } else {
        large
    }
}

/// Applies `tanh` to stacked jets row by row.
fn tanh_jets(z: &Array2<f64>, n: usize, nc: usize) -> Array2<f64> {
    let mut y = Array2::zeros(z.raw_dim());
    for (zr, mut yr) in z.outer_iter().zip(y.outer_iter_mut()) {
        let zr = zr.to_slice().expect("row-major");
        let yr = yr.as_slice_mut().expect("row-major");
        let (zv, zd) = zr.split_at(n);
        let (yv, yd) = yr.split_at_mut(n);
        for (y, &z) in yv.iter_mut().zip(zv) {
            *y = tanh_fast(z);
        }
        if nc < 3 {
            continue;
        }
        let (zx, zd) = zd.split_at(n);
        let (zt, zxx) = zd.split_at(n);
        let (yx, yd) = yd.split_at_mut(n);
        let (yt, yxx) = yd.split_at_mut(n);
        for i in 0..n {
            let v = yv[i];
            let slope = 1.0 - v * v;
            yx[i] = slope * zx[i];
            yt[i] = slope * zt[i];
        }
        if nc == 4 {
            for i in 0..n {
                let v = yv[i];
                let slope = 1.0 - v * v;
                yxx[i] = slope * zxx[i] - 2.0 * v * slope * zx[i] * zx[i];
            }
        }
    }
    y
}

/// Adjoint of [`tanh_jets`]: maps output adjoints to pre-activation adjoints.
fn tanh_jets_adjoint(z: &Array2<f64>, y: &Array2<f64>, ybar: &Array2<f64>, n: usize, nc: usize) -> Array2<f64> {
    let mut zbar = Array2::zeros(z.raw_dim());
    for ((zr, yr), (gr, mut out)) in z
        .outer_iter()
        .zip(y.outer_iter())
        .zip(ybar.outer_iter().zip(zbar.outer_iter_mut()))
    {
        let zr = zr.to_slice().expect("row-major");
        let yv = &yr.to_slice().expect("row-major")[..n];
        let gr = gr.to_slice().expect("row-major");
        let out = out.as_slice_mut().expect("row-major");
        let (gv, gd) = gr.split_at(n);
        let (ov, od) = out.split_at_mut(n);
        if nc < 3 {
            for i in 0..n {
                let v = yv[i];
                ov[i] = gv[i] * (1.0 - v * v);
            }
            continue;
        }
        let zx = &zr[n..2 * n];
        let zt = &zr[2 * n..3 * n];
        let (gx, gd) = gd.split_at(n);
        let (gt, gxx) = gd.split_at(n);
        let (ox, od) = od.split_at_mut(n);
        let (ot, oxx) = od.split_at_mut(n);
        if nc == 3 {
            for i in 0..n {
                let v = yv[i];
                let slope = 1.0 - v * v;
                // d(slope)/dz = -2 v slope
                let dslope = -2.0 * v * slope;
                ov[i] = gv[i] * slope + (gx[i] * zx[i] + gt[i] * zt[i]) * dslope;
                ox[i] = gx[i] * slope;
                ot[i] = gt[i] * slope;
            }
            continue;
        }
        let zxx = &zr[3 * n..4 * n];
        for i in 0..n {
            let v = yv[i];
            let slope = 1.0 - v * v;
            let dslope = -2.0 * v * slope;
            let (x, g) = (zx[i], gxx[i]);
            // y_xx = slope z_xx - 2 v slope z_x^2, d(v slope)/dz = slope (1 - 3 v^2)
            ov[i] = gv[i] * slope
                + (gx[i] * x + gt[i] * zt[i]) * dslope
                + g * (zxx[i] * dslope - 2.0 * x * x * slope * (1.0 - 3.0 * v * v));
            ox[i] = gx[i] * slope + g * (-4.0 * v * slope * x);
            ot[i] = gt[i] * slope;
            oxx[i] = g * slope;
        }
    }
    zbar
}

/// Reverse sweep from output adjoints, adding into `grad`.
fn backward(params: &MlpParams, trace: &Trace, output_adjoint: Array2<f64>, grad: &mut [f64]) {
    let (n, nc) = (trace.n, trace.channels);
    let mut adj = output_adjoint;
    for l in (0..params.num_layers()).rev() {
        let off = params.layer_offsets(l);
        let (w, _) = weights(params, l);
        {
            let (head, tail) = grad.split_at_mut(off.bias);
            let mut wbar = ArrayViewMut2::from_shape((off.rows, off.cols), &mut head[off.weights..])
                .expect("weight block matches layer shape");
            general_mat_mul(1.0, &adj, &trace.acts[l].t(), 1.0, &mut wbar);
            let bias_sum = adj.slice(s![.., 0..n]).sum_axis(Axis(1));
            for (g, v) in tail[..off.rows].iter_mut().zip(bias_sum.iter()) {
                *g += v;
            }
        }
        if l > 0 {
            let act_bar = w.t().dot(&adj);
            adj = tanh_jets_adjoint(&trace.pres[l - 1], &trace.acts[l], &act_bar, n, nc);
        }
    }
}

fn residual_channels(viscosity: f64) -> Channels {
    if viscosity == 0.0 {
        Channels::FirstOrder
    } else {
        Channels::SecondOrder
    }
}

/// Sum of squared residuals over a chunk; optionally adds `scale * d/dθ` of it.
fn residual_chunk(
    params: &MlpParams,
    flux: &FluxKind,
    viscosity: f64,
    points: &[(f64, f64)],
    gradient_scale: Option<f64>,
) -> (f64, Option<Vec<f64>>) {
    let channels = residual_channels(viscosity);
    let trace = forward(params, points, channels);
    let n = trace.n;
    let out = trace.pres.last().expect("at least one layer");
    let out = out.row(0);
    let out = out.as_slice().expect("row-major");
    let mut sum = 0.0;
    let mut fs = vec![0.0; n];
    for i in 0..n {
        let (u, ux, ut) = (out[i], out[n + i], out[2 * n + i]);
        let mut f = ut + flux.deriv(u) * ux;
        if channels == Channels::SecondOrder {
            f -= viscosity * out[3 * n + i];
        }
        fs[i] = f;
        sum += f * f;
    }
    let grad = gradient_scale.map(|scale| {
        let mut adj = Array2::zeros((1, channels as usize * n));
        {
            let a = adj.as_slice_mut().expect("row-major");
            for i in 0..n {
                let fbar = 2.0 * scale * fs[i];
                let (u, ux) = (out[i], out[n + i]);
                a[i] = fbar * flux.second_deriv(u) * ux;
                a[n + i] = fbar * flux.deriv(u);
                a[2 * n + i] = fbar;
                if channels == Channels::SecondOrder {
                    a[3 * n + i] = -viscosity * fbar;
                }
            }
        }
        let mut g = vec![0.0; params.len()];
        backward(params, &trace, adj, &mut g);
        g
    });
    (sum, grad)
}

/// Sum of squared initial mismatches over a chunk.
fn initial_chunk(
    params: &MlpParams,
    points: &[(f64, f64)],
    gradient_scale: Option<f64>,
) -> (f64, Option<Vec<f64>>) {
    let xt: Vec<(f64, f64)> = points.iter().map(|&(x, _)| (x, 0.0)).collect();
    let trace = forward(params, &xt, Channels::Value);
    let out = trace.pres.last().expect("at least one layer");
    let diffs: Vec<f64> = out
        .row(0)
        .iter()
        .zip(points)
        .map(|(u, &(_, u0))| u - u0)
        .collect();
    let sum = diffs.iter().map(|d| d * d).sum();
    let grad = gradient_scale.map(|scale| {
        let adj = Array2::from_shape_vec((1, diffs.len()), diffs.iter().map(|d| 2.0 * scale * d).collect())
            .expect("one row");
        let mut g = vec![0.0; params.len()];
        backward(params, &trace, adj, &mut g);
        g
    });
    (sum, grad)
}

fn pairwise_sum_scalars(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => pairwise_sum_scalars(&values[..n / 2]) + pairwise_sum_scalars(&values[n / 2..]),
    }
}

fn pairwise_sum_vectors(mut parts: Vec<Vec<f64>>, len: usize) -> Vec<f64> {
    if parts.is_empty() {
        return vec![0.0; len];
    }
    // combine neighbours level by level: a fixed binary tree over chunk order
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
            }
            next.push(a);
        }
        parts = next;
    }
    parts.pop().unwrap()
}

type ChunkResult = (f64, Option<Vec<f64>>);

fn reduce(results: Vec<ChunkResult>, len: usize) -> (f64, Option<Vec<f64>>) {
    let sums: Vec<f64> = results.iter().map(|r| r.0).collect();
    let total = pairwise_sum_scalars(&sums);
    let grads: Option<Vec<Vec<f64>>> = results.into_iter().map(|r| r.1).collect();
    (total, grads.map(|g| pairwise_sum_vectors(g, len)))
}

fn residual_part(
    params: &MlpParams,
    flux: &FluxKind,
    viscosity: f64,
    interior: &[(f64, f64)],
    with_gradient: bool,
) -> (f64, Option<Vec<f64>>) {
    let n = interior.len().max(1) as f64;
    let scale = with_gradient.then_some(1.0 / n);
    let results: Vec<_> = interior
        .par_chunks(CHUNK)
        .map(|c| residual_chunk(params, flux, viscosity, c, scale))
        .collect();
    let (sum, grad) = reduce(results, params.len());
    (sum / n, grad)
}

fn initial_part(
    params: &MlpParams,
    initial: &[(f64, f64)],
    with_gradient: bool,
) -> (f64, Option<Vec<f64>>) {
    let n = initial.len().max(1) as f64;
    let scale = with_gradient.then_some(1.0 / n);
    let results: Vec<_> = initial
        .par_chunks(CHUNK)
        .map(|c| initial_chunk(params, c, scale))
        .collect();
    let (sum, grad) = reduce(results, params.len());
    (sum / n, grad)
}

/// `L_f = mean f^2` over the interior points.
pub fn loss_f(params: &MlpParams, flux: &FluxKind, viscosity: f64, interior: &[(f64, f64)]) -> f64 {
    residual_part(params, flux, viscosity, interior, false).0
}

/// `L_u = mean (u(x, 0) - u0)^2` over `(x, u0)` pairs.
pub fn loss_u(params: &MlpParams, initial: &[(f64, f64)]) -> f64 {
    initial_part(params, initial, false).0
}

/// Both losses and the gradient of `L_f + L_u` with respect to every parameter.
pub fn loss_and_gradient(
    params: &MlpParams,
    flux: &FluxKind,
    viscosity: f64,
    interior: &[(f64, f64)],
    initial: &[(f64, f64)],
) -> (LossBreakdown, Vec<f64>) {
    let ((lf, gf), (lu, gu)) = rayon::join(
        || residual_part(params, flux, viscosity, interior, true),
        || initial_part(params, initial, true),
    );
    let mut grad = gf.expect("gradient requested");
    grad.iter_mut()
        .zip(gu.expect("gradient requested"))
        .for_each(|(a, b)| *a += b);
    (LossBreakdown { loss_f: lf, loss_u: lu }, grad)
}

/// Gradients of the two losses separately, for diagnostics and tests.
pub fn loss_gradients_split(
    params: &MlpParams,
    flux: &FluxKind,
    viscosity: f64,
    interior: &[(f64, f64)],
    initial: &[(f64, f64)],
) -> (Vec<f64>, Vec<f64>) {
    let gf = residual_part(params, flux, viscosity, interior, true).1.unwrap();
    let gu = initial_part(params, initial, true).1.unwrap();
    (gf, gu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ulps(a: f64, b: f64) -> f64 {
        (a - b).abs() / (f64::EPSILON * b.abs().max(f64::MIN_POSITIVE))
    }

    #[test]
    fn tanh_fast_edges() {
        assert_eq!(tanh_fast(0.0), 0.0);
        assert_eq!(tanh_fast(800.0), 1.0);
        assert_eq!(tanh_fast(-800.0), -1.0);
        for x in [1e-300, 1e-8, 0.3, 0.625, 0.6249999999, 1.0, 5.0, 19.0, 40.0] {
            assert!(ulps(tanh_fast(x), x.tanh()) <= 4.0, "{x}");
            assert_eq!(tanh_fast(-x), -tanh_fast(x));
        }
    }

    proptest! {
        #[test]
        fn tanh_fast_matches_libm(x in -30.0f64..30.0) {
            prop_assert!(ulps(tanh_fast(x), x.tanh()) <= 4.0);
        }
    }
}
