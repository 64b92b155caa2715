use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::problems::ConservationLawProblem;
use crate::{Error, Result};

/// Points where the residual is penalised plus the initial-value data.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationSet {
    /// Interior `(x, t)` residual points.
    pub interior: Vec<(f64, f64)>,
    /// `(x, u_0(x))` at `t = 0`.
    pub initial: Vec<(f64, f64)>,
}

/// `n` equispaced abscissae from `x_min` to `x_max` inclusive.
pub fn equispaced(x_min: f64, x_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.5 * (x_min + x_max)],
        _ => {
            let h = (x_max - x_min) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { x_max } else { x_min + i as f64 * h })
                .collect()
        }
    }
}

/// Interior points uniform over the space-time window (seeded); initial
/// points equispaced over `[x_min, x_max]`.
pub fn sample_collocation(
    problem: &ConservationLawProblem,
    n_f: usize,
    n_u: usize,
    seed: u64,
) -> Result<CollocationSet> {
    if n_f == 0 || n_u == 0 {
        return Err(Error::InvalidConfig(
            "collocation and initial point counts must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs = Uniform::new_inclusive(problem.x_min, problem.x_max);
    let ts = Uniform::new_inclusive(0.0, problem.t_end);
    let interior = (0..n_f)
        .map(|_| (xs.sample(&mut rng), ts.sample(&mut rng)))
        .collect();
    let initial = equispaced(problem.x_min, problem.x_max, n_u)
        .into_iter()
        .map(|x| (x, problem.ic.eval(x)))
        .collect();
    Ok(CollocationSet { interior, initial })
}
