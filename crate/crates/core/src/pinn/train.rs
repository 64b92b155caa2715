use serde::{Deserialize, Serialize};

use crate::problems::ConservationLawProblem;
use crate::{Error, Result};

use super::batch::{loss_and_gradient, LossBreakdown};
use super::collocation::{sample_collocation, CollocationSet};
use super::mlp::{init_params, InputBounds, MlpParams};

/// Everything needed to reproduce one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub problem: ConservationLawProblem,
    pub n_f: usize,
    pub n_u: usize,
    pub width: usize,
    /// Coefficient of the `u_xx` term in the residual.
    pub viscosity: f64,
    pub seed: u64,
    pub optimizer: AdamConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub iterations: usize,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            iterations: 20_000,
        }
    }
}

impl TrainingConfig {
    /// `N_f = 10^4`, `N_u = 100`, 40 neurons, no viscosity, seed 0.
    pub fn new(problem: ConservationLawProblem) -> Self {
        TrainingConfig {
            problem,
            n_f: 10_000,
            n_u: 100,
            width: 40,
            viscosity: 0.0,
            seed: 0,
            optimizer: AdamConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.problem.validate()?;
        let invalid = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_f == 0 || self.n_u == 0 || self.width == 0 {
            return invalid(format!(
                "n_f, n_u and width must be at least 1 (got {}, {}, {})",
                self.n_f, self.n_u, self.width
            ));
        }
        if !(self.viscosity.is_finite() && self.viscosity >= 0.0) {
            return invalid(format!("viscosity must be >= 0, got {}", self.viscosity));
        }
        let opt = &self.optimizer;
        if !(opt.learning_rate > 0.0 && opt.learning_rate.is_finite()) {
            return invalid(format!("learning rate must be positive, got {}", opt.learning_rate));
        }
        if !((0.0..1.0).contains(&opt.beta1) && (0.0..1.0).contains(&opt.beta2) && opt.epsilon > 0.0) {
            return invalid("Adam moment decays must lie in [0, 1) and epsilon must be positive".into());
        }
        Ok(())
    }

    /// Collocation and initial points. The sampler seed is derived from `seed`.
    pub fn collocation(&self) -> Result<CollocationSet> {
        sample_collocation(&self.problem, self.n_f, self.n_u, self.seed.wrapping_add(0x5eed))
    }

    pub fn initial_params(&self) -> Result<MlpParams> {
        init_params(self.width, self.seed, InputBounds::from_problem(&self.problem))
    }
}

/// Adam state over a flat parameter vector.
#[derive(Debug, Clone)]
pub struct Adam {
    config: AdamConfig,
    first: Vec<f64>,
    second: Vec<f64>,
    steps: i32,
}

impl Adam {
    pub fn new(config: AdamConfig, len: usize) -> Self {
        Adam {
            config,
            first: vec![0.0; len],
            second: vec![0.0; len],
            steps: 0,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        let AdamConfig {
            learning_rate,
            beta1,
            beta2,
            epsilon,
            ..
        } = self.config;
        self.steps += 1;
        let c1 = 1.0 - beta1.powi(self.steps);
        let c2 = 1.0 - beta2.powi(self.steps);
        for (((p, g), m), v) in params
            .iter_mut()
            .zip(grad)
            .zip(self.first.iter_mut())
            .zip(self.second.iter_mut())
        {
            *m = beta1 * *m + (1.0 - beta1) * g;
            *v = beta2 * *v + (1.0 - beta2) * g * g;
            *p -= learning_rate * (*m / c1) / ((*v / c2).sqrt() + epsilon);
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainingOutcome {
    pub params: MlpParams,
    /// Total loss before each update.
    pub loss_history: Vec<f64>,
    /// Losses of the returned parameters.
    pub final_losses: LossBreakdown,
}

/// Minimises `L_f + L_u` with full-batch Adam.
pub fn train(config: &TrainingConfig) -> Result<TrainingOutcome> {
    train_with_progress(config, |_, _| {})
}

/// As [`train`], calling `progress(iteration, losses)` before every update.
pub fn train_with_progress(
    config: &TrainingConfig,
    mut progress: impl FnMut(usize, &LossBreakdown),
) -> Result<TrainingOutcome> {
    config.validate()?;
    let points = config.collocation()?;
    let mut params = config.initial_params()?;
    let flux = config.problem.flux;
    let mut adam = Adam::new(config.optimizer, params.len());
    let mut history = Vec::with_capacity(config.optimizer.iterations);
    for iteration in 0..config.optimizer.iterations {
        let (losses, grad) = loss_and_gradient(
            &params,
            &flux,
            config.viscosity,
            &points.interior,
            &points.initial,
        );
        let total = losses.total();
        if !total.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::TrainingDiverged {
                iteration,
                loss: total,
            });
        }
        progress(iteration, &losses);
        history.push(total);
        adam.step(params.as_mut_slice(), &grad);
    }
    let final_losses = LossBreakdown {
        loss_f: super::batch::loss_f(&params, &flux, config.viscosity, &points.interior),
        loss_u: super::batch::loss_u(&params, &points.initial),
    };
    if !final_losses.total().is_finite() || !params.is_finite() {
        return Err(Error::TrainingDiverged {
            iteration: config.optimizer.iterations,
            loss: final_losses.total(),
        });
    }
    Ok(TrainingOutcome {
        params,
        loss_history: history,
        final_losses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::ProblemId;

    fn small(id: ProblemId, iterations: usize) -> TrainingConfig {
        let mut c = TrainingConfig::new(id.problem());
        c.n_f = 200;
        c.n_u = 20;
        c.width = 6;
        c.optimizer.iterations = iterations;
        c
    }

    #[test]
    fn zero_iterations_returns_initial_parameters() {
        let c = small(ProblemId::BurgersShock, 0);
        let out = train(&c).unwrap();
        assert_eq!(out.params, c.initial_params().unwrap());
        assert!(out.loss_history.is_empty());
    }

    #[test]
    fn loss_decreases_and_is_deterministic() {
        for id in ProblemId::ALL {
            let mut c = small(id, 60);
            c.viscosity = 0.01;
            let a = train(&c).unwrap();
            assert!(a.final_losses.total() < a.loss_history[0], "{id}");
            let b = train(&c).unwrap();
            assert_eq!(a.loss_history, b.loss_history);
            assert_eq!(a.params, b.params);
        }
    }

    #[test]
    fn divergence_is_reported() {
        let mut c = small(ProblemId::BurgersSmooth, 50);
        c.optimizer.learning_rate = 1e300;
        match train(&c) {
            Err(Error::TrainingDiverged { iteration, .. }) => assert!(iteration > 0),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn validation() {
        let mut c = small(ProblemId::BurgersShock, 1);
        c.viscosity = -1.0;
        assert!(c.validate().is_err());
        c.viscosity = 0.0;
        c.n_f = 0;
        assert!(c.validate().is_err());
        c.n_f = 1;
        c.optimizer.beta1 = 1.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn adam_first_step_moves_by_learning_rate() {
        let cfg = AdamConfig::default();
        let mut adam = Adam::new(cfg, 2);
        let mut p = [1.0, -1.0];
        adam.step(&mut p, &[0.5, -3.0]);
        assert!((p[0] - (1.0 - 1e-3)).abs() < 1e-10);
        assert!((p[1] - (-1.0 + 1e-3)).abs() < 1e-10);
    }
}
