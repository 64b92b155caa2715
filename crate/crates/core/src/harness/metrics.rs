use serde::{Deserialize, Serialize};

use crate::fv::GridSolution;
use crate::oracles::ExactSolution;
use crate::pinn::{equispaced, MlpParams};
use crate::{Error, Result};

/// Mean of squared differences.
pub fn error_vs_reference(u_nn: &[f64], u_ref: &[f64]) -> Result<f64> {
    if u_nn.len() != u_ref.len() || u_nn.is_empty() {
        return Err(Error::LengthMismatch {
            left: u_nn.len(),
            right: u_ref.len(),
        });
    }
    let sum: f64 = u_nn
        .iter()
        .zip(u_ref)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sum / u_nn.len() as f64)
}

/// Anything that can be sampled at `(x, t)`.
#[derive(Debug, Clone, Copy)]
pub enum FieldSource<'a> {
    /// Finite-volume output; only recorded times can be sampled.
    Grid(&'a GridSolution),
    Network(&'a MlpParams),
    Exact(ExactSolution),
}

impl FieldSource<'_> {
    pub fn sample(&self, t: f64, xs: &[f64]) -> Result<Vec<f64>> {
        match self {
            FieldSource::Grid(sol) => {
                let row = sol.level(t)?;
                Ok(xs
                    .iter()
                    .map(|&x| crate::fv::interpolate_uniform(&sol.x_centers, row, x))
                    .collect())
            }
            FieldSource::Network(params) => Ok(xs.iter().map(|&x| params.forward(x, t)).collect()),
            FieldSource::Exact(exact) => xs.iter().map(|&x| exact.eval(x, t)).collect(),
        }
    }
}

/// Samples `source` at `n_u` equispaced points of `[x_min, x_max]` at time `t`.
pub fn sample_for_comparison(
    source: &FieldSource<'_>,
    t: f64,
    x_min: f64,
    x_max: f64,
    n_u: usize,
) -> Result<Vec<f64>> {
    source.sample(t, &equispaced(x_min, x_max, n_u))
}

/// Network errors against the two finite-volume references over time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSeries {
    pub times: Vec<f64>,
    /// Against Lax-Friedrichs.
    pub elf: Vec<f64>,
    /// Against Lagrangian-Eulerian.
    pub eel: Vec<f64>,
}

impl ErrorSeries {
    /// Evaluates both errors at each time on the given abscissae.
    pub fn compute(
        candidate: &FieldSource<'_>,
        lax_friedrichs: &FieldSource<'_>,
        lagrangian_eulerian: &FieldSource<'_>,
        times: &[f64],
        xs: &[f64],
    ) -> Result<Self> {
        let mut series = ErrorSeries {
            times: times.to_vec(),
            elf: Vec::with_capacity(times.len()),
            eel: Vec::with_capacity(times.len()),
        };
        for &t in times {
            let u = candidate.sample(t, xs)?;
            series.elf.push(error_vs_reference(&u, &lax_friedrichs.sample(t, xs)?)?);
            series.eel.push(error_vs_reference(&u, &lagrangian_eulerian.sample(t, xs)?)?);
        }
        Ok(series)
    }

    pub fn max_eel(&self) -> f64 {
        self.eel.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_elf(&self) -> f64 {
        self.elf.iter().cloned().fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fv::{solve, FvConfig, SchemeKind};
    use crate::problems::ProblemId;

    #[test]
    fn error_metric() {
        assert_eq!(error_vs_reference(&[0.3, 0.2], &[0.3, 0.2]).unwrap(), 0.0);
        let d = 0.25;
        let a = [1.0, -2.0, 0.5];
        let b: Vec<f64> = a.iter().map(|v| v + d).collect();
        assert!((error_vs_reference(&a, &b).unwrap() - d * d).abs() < 1e-15);
        assert_eq!(error_vs_reference(&[1.0, 0.0], &[0.0, 0.0]).unwrap(), 0.5);
        assert!(matches!(
            error_vs_reference(&[1.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch { left: 1, right: 2 })
        ));
        assert!(error_vs_reference(&[], &[]).is_err());
    }

    #[test]
    fn comparison_sampling() {
        let xs = equispaced(-10.0, 10.0, 100);
        assert_eq!((xs[0], xs[99]), (-10.0, 10.0));

        let problem = ProblemId::BurgersShock.problem();
        let exact = FieldSource::Exact(ExactSolution::BurgersShock);
        let a = sample_for_comparison(&exact, 3.0, -10.0, 10.0, 100).unwrap();
        assert_eq!(error_vs_reference(&a, &a).unwrap(), 0.0);

        let mut flat = crate::pinn::MlpParams::zeros(
            crate::pinn::MlpParams::architecture(2),
            crate::pinn::InputBounds::from_problem(&problem),
        )
        .unwrap();
        flat.set_output_bias(0.7);
        let v = sample_for_comparison(&FieldSource::Network(&flat), 1.0, -10.0, 10.0, 100).unwrap();
        assert!(v.iter().all(|&u| u == 0.7));

        let config = FvConfig {
            dx: 0.5,
            cfl_number: 0.4,
            scheme: SchemeKind::LaxFriedrichs,
            record_times: vec![0.5],
        };
        let mut sol = solve(&problem, &config).unwrap();
        sol.values.fill(-0.3);
        let g = sample_for_comparison(&FieldSource::Grid(&sol), 0.5, -10.0, 10.0, 100).unwrap();
        assert!(g.iter().all(|&u| u == -0.3));
        assert!(sample_for_comparison(&FieldSource::Grid(&sol), 0.7, -10.0, 10.0, 100).is_err());
    }
}
