//! Derivative checks against finite differences. Training results are only
//! meaningful once these pass.

use hyperlab::autodiff::{Scalar, Tape};
use hyperlab::pinn::mlp::jet_forward;
use hyperlab::pinn::residual::residual_of_jet;
use hyperlab::pinn::{
    init_params, loss_and_gradient, loss_f, loss_u, sample_collocation, taped_loss_gradient,
    InputBounds, MlpParams,
};
use hyperlab::problems::{FluxKind, ProblemId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Width-4 network with Glorot weights and random, non-zero biases.
fn random_net(problem: ProblemId, seed: u64) -> MlpParams {
    let mut params = init_params(4, seed, InputBounds::from_problem(&problem.problem())).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb1a5);
    for l in 0..params.num_layers() {
        let o = params.layer_offsets(l);
        for b in &mut params.as_mut_slice()[o.bias..o.bias + o.rows] {
            *b = rng.gen_range(-0.5..0.5);
        }
    }
    params
}

fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

fn cases() -> Vec<(ProblemId, f64)> {
    vec![
        (ProblemId::BurgersRarefaction, 0.0),
        (ProblemId::BurgersShock, 0.01),
        (ProblemId::BurgersSmooth, 0.01),
        (ProblemId::BlShock, 0.01),
        (ProblemId::BlShock, 0.0),
    ]
}

#[test]
fn loss_gradient_matches_central_differences() {
    let h = 1e-6;
    let mut worst = 0.0f64;
    for (k, (id, eps)) in cases().into_iter().enumerate() {
        let problem = id.problem();
        let set = sample_collocation(&problem, 10, 5, 7 + k as u64).unwrap();
        let params = random_net(id, k as u64);
        let total = |p: &MlpParams| {
            loss_f(p, &problem.flux, eps, &set.interior) + loss_u(p, &set.initial)
        };
        let (_, grad) = loss_and_gradient(&params, &problem.flux, eps, &set.interior, &set.initial);
        let mut rng = ChaCha8Rng::seed_from_u64(100 + k as u64);
        for _ in 0..20 {
            let i = rng.gen_range(0..params.len());
            let mut plus = params.clone();
            plus.as_mut_slice()[i] += h;
            let mut minus = params.clone();
            minus.as_mut_slice()[i] -= h;
            let fd = (total(&plus) - total(&minus)) / (2.0 * h);
            let e = rel_err(grad[i], fd, 1e-4);
            worst = worst.max(e);
            assert!(e < 1e-5, "{id} eps {eps} param {i}: autodiff {} vs fd {fd}", grad[i]);
        }
    }
    eprintln!("worst relative gradient error {worst:.2e}");
}

#[test]
fn batched_gradient_agrees_with_scalar_tape() {
    for (k, (id, eps)) in cases().into_iter().enumerate() {
        let problem = id.problem();
        let set = sample_collocation(&problem, 10, 5, k as u64).unwrap();
        let params = random_net(id, 50 + k as u64);
        let (losses, batched) =
            loss_and_gradient(&params, &problem.flux, eps, &set.interior, &set.initial);
        let (loss, taped) =
            taped_loss_gradient(&params, &problem.flux, eps, &set.interior, &set.initial);
        assert!(rel_err(losses.total(), loss, 1e-300) < 1e-12);
        for (i, (a, b)) in batched.iter().zip(&taped).enumerate() {
            assert!(rel_err(*a, *b, 1e-12) < 1e-9, "{id} param {i}: {a} vs {b}");
        }
    }
}

#[test]
fn input_derivatives_match_finite_differences() {
    for k in 0..50u64 {
        let id = ProblemId::ALL[k as usize % 4];
        let params = random_net(id, 1000 + k);
        let problem = id.problem();
        let mut rng = ChaCha8Rng::seed_from_u64(k);
        let x = rng.gen_range(problem.x_min..problem.x_max);
        let t = rng.gen_range(0.0..problem.t_end);
        let jet = params.dual_propagate(x, t);
        assert_eq!(jet.value, params.forward(x, t));

        let h = 1e-5;
        let fd_x = (params.forward(x + h, t) - params.forward(x - h, t)) / (2.0 * h);
        let fd_t = (params.forward(x, t + h) - params.forward(x, t - h)) / (2.0 * h);
        assert!(rel_err(jet.d_dx, fd_x, 1e-3) < 1e-6, "u_x {} vs {fd_x}", jet.d_dx);
        assert!(rel_err(jet.d_dt, fd_t, 1e-3) < 1e-6, "u_t {} vs {fd_t}", jet.d_dt);

        let h = 1e-4;
        let fd_xx =
            (params.forward(x + h, t) - 2.0 * jet.value + params.forward(x - h, t)) / (h * h);
        assert!((jet.d2_dx2 - fd_xx).abs() < 1e-5, "u_xx {} vs {fd_xx}", jet.d2_dx2);
    }
}

#[test]
fn gradient_is_linear_in_the_loss() {
    let problem = ProblemId::BlShock.problem();
    let params = random_net(ProblemId::BlShock, 3);
    let (alpha, beta) = (0.37, -2.5);
    let grads_of = |weights: (f64, f64)| {
        let tape = Tape::new();
        let vars: Vec<_> = params.as_slice().iter().map(|&v| tape.var(v)).collect();
        let jet = jet_forward(params.layer_sizes(), params.bounds(), &vars, 1.5, 2.0);
        let f = residual_of_jet(&jet, &problem.flux, 0.01);
        let d = jet.value + (-0.25);
        let loss = f * f * weights.0 + d * d * weights.1;
        let g = tape.gradient(&loss);
        vars.iter().map(|v| g[v]).collect::<Vec<f64>>()
    };
    let g1 = grads_of((1.0, 0.0));
    let g2 = grads_of((0.0, 1.0));
    let combined = grads_of((alpha, beta));
    for i in 0..params.len() {
        assert!((combined[i] - (alpha * g1[i] + beta * g2[i])).abs() < 1e-12);
    }

    // the batched route splits the same way
    let set = sample_collocation(&problem, 12, 6, 1).unwrap();
    let (_, both) = loss_and_gradient(&params, &problem.flux, 0.01, &set.interior, &set.initial);
    let (_, only_f) = loss_and_gradient(&params, &problem.flux, 0.01, &set.interior, &[]);
    let (_, only_u) = loss_and_gradient(&params, &problem.flux, 0.01, &[], &set.initial);
    for i in 0..params.len() {
        assert!((both[i] - (only_f[i] + only_u[i])).abs() < 1e-12);
    }
}

#[test]
fn derivatives_are_deterministic() {
    let problem = ProblemId::BurgersSmooth.problem();
    let params = random_net(ProblemId::BurgersSmooth, 9);
    let set = sample_collocation(&problem, 300, 20, 4).unwrap();
    let a = loss_and_gradient(&params, &problem.flux, 0.01, &set.interior, &set.initial);
    let b = loss_and_gradient(&params, &problem.flux, 0.01, &set.interior, &set.initial);
    assert_eq!(a.0, b.0);
    assert_eq!(a.1, b.1);
    assert_eq!(params.dual_propagate(0.3, 0.4), params.dual_propagate(0.3, 0.4));
}

#[test]
fn stationary_point_has_zero_gradient() {
    let params = random_net(ProblemId::BurgersShock, 11);
    let c = params.forward(0.5, 0.0);
    let (loss, grad) = taped_loss_gradient(&params, &FluxKind::Burgers, 0.0, &[], &[(0.5, c)]);
    assert_eq!(loss, 0.0);
    assert!(grad.iter().all(|&g| g == 0.0));
}

#[test]
fn scalar_tape_single_parameter() {
    let x0 = 0.8;
    for w0 in [-1.3, 0.0, 0.4, 2.0] {
        let tape = Tape::new();
        let w = tape.var(w0);
        let u = Scalar::tanh(w * x0);
        let loss = u * u;
        let g = tape.gradient(&loss);
        let uv = (w0 * x0).tanh();
        assert!((g[&w] - 2.0 * uv * (1.0 - uv * uv) * x0).abs() < 1e-15);
    }
}
