//! Experiment configuration documents.
//!
//! One TOML document per experiment. The document is echoed verbatim into
//! the experiment report, and parsing that echo back gives the exact
//! configuration again.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::fv::{FvConfig, SchemeKind};
use crate::pinn::{AdamConfig, TrainingConfig};
use crate::problems::ProblemId;
use crate::{Error, Result};

/// Iteration budget of the desk-scale profile.
pub const QUICK_ITERATIONS: usize = 3_000;

/// Iteration budget of the full profile.
pub const FULL_ITERATIONS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// `N_f = 10^4` everywhere with a reduced iteration budget.
    Quick,
    /// `N_f = 10^6` for the smooth and Buckley-Leverett cases, full budget.
    Full,
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Profile::Quick),
            "full" => Ok(Profile::Full),
            _ => Err(Error::InvalidConfig(format!(
                "unknown profile `{s}`; expected quick or full"
            ))),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Quick => "quick",
            Profile::Full => "full",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FvSettings {
    pub dx: f64,
    pub cfl_lax_friedrichs: f64,
    pub cfl_lagrangian_eulerian: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingSettings {
    pub width: usize,
    pub n_f: usize,
    pub n_u: usize,
    pub viscosity: f64,
    pub seed: u64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemId,
    pub profile: Profile,
    /// Times at which ELF and EEL are reported.
    pub report_times: Vec<f64>,
    /// Times at which the network is also compared with the exact solution.
    pub oracle_times: Vec<f64>,
    /// Number of equispaced comparison abscissae.
    pub comparison_points: usize,
    pub fv: FvSettings,
    pub training: TrainingSettings,
}

/// Command-line adjustments applied on top of a catalog configuration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub width: Option<usize>,
    pub n_f: Option<usize>,
    pub n_u: Option<usize>,
    pub viscosity: Option<f64>,
    pub seed: Option<u64>,
    pub iterations: Option<usize>,
    pub learning_rate: Option<f64>,
    pub dx: Option<f64>,
}

impl ExperimentConfig {
    /// Catalog defaults for a problem under a profile.
    pub fn catalog(problem: ProblemId, profile: Profile) -> Self {
        let (report_times, oracle_times) = match problem {
            // the shock leaves x = 8 near t = 6.6
            ProblemId::BlShock => (vec![1.0, 2.0, 3.0, 4.0], vec![1.0, 2.0, 3.0, 4.0]),
            // exact solution only before the first shock at t = 1
            ProblemId::BurgersSmooth => (vec![2.0, 4.0, 6.0, 8.0], vec![0.25, 0.5, 0.75]),
            _ => (vec![2.0, 4.0, 6.0, 8.0], vec![2.0, 4.0, 6.0, 8.0]),
        };
        let viscosity = match problem {
            ProblemId::BurgersRarefaction => 0.0,
            _ => 0.01,
        };
        let (n_f, iterations) = match (profile, problem) {
            (Profile::Quick, _) => (10_000, QUICK_ITERATIONS),
            (Profile::Full, ProblemId::BurgersSmooth | ProblemId::BlShock) => {
                (1_000_000, FULL_ITERATIONS)
            }
            (Profile::Full, _) => (10_000, FULL_ITERATIONS),
        };
        let adam = AdamConfig::default();
        ExperimentConfig {
            problem,
            profile,
            report_times,
            oracle_times,
            comparison_points: 100,
            fv: FvSettings {
                dx: 0.01,
                cfl_lax_friedrichs: 0.4,
                cfl_lagrangian_eulerian: 0.2,
            },
            training: TrainingSettings {
                width: 40,
                n_f,
                n_u: 100,
                viscosity,
                seed: 0,
                iterations,
                learning_rate: adam.learning_rate,
                beta1: adam.beta1,
                beta2: adam.beta2,
                adam_epsilon: adam.epsilon,
            },
        }
    }

    pub fn with_overrides(mut self, o: &Overrides) -> Self {
        let t = &mut self.training;
        if let Some(v) = o.width {
            t.width = v;
        }
        if let Some(v) = o.n_f {
            t.n_f = v;
        }
        if let Some(v) = o.n_u {
            t.n_u = v;
        }
        if let Some(v) = o.viscosity {
            t.viscosity = v;
        }
        if let Some(v) = o.seed {
            t.seed = v;
        }
        if let Some(v) = o.iterations {
            t.iterations = v;
        }
        if let Some(v) = o.learning_rate {
            t.learning_rate = v;
        }
        if let Some(v) = o.dx {
            self.fv.dx = v;
        }
        self
    }

    pub fn training_config(&self) -> TrainingConfig {
        let t = &self.training;
        TrainingConfig {
            problem: self.problem.problem(),
            n_f: t.n_f,
            n_u: t.n_u,
            width: t.width,
            viscosity: t.viscosity,
            seed: t.seed,
            optimizer: AdamConfig {
                learning_rate: t.learning_rate,
                beta1: t.beta1,
                beta2: t.beta2,
                epsilon: t.adam_epsilon,
                iterations: t.iterations,
            },
        }
    }

    pub fn fv_config(&self, scheme: SchemeKind) -> FvConfig {
        let cfl_number = match scheme {
            SchemeKind::LaxFriedrichs => self.fv.cfl_lax_friedrichs,
            SchemeKind::LagrangianEulerian => self.fv.cfl_lagrangian_eulerian,
        };
        FvConfig {
            dx: self.fv.dx,
            cfl_number,
            scheme,
            record_times: self.report_times.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let problem = self.problem.problem();
        self.training_config().validate()?;
        for scheme in [SchemeKind::LaxFriedrichs, SchemeKind::LagrangianEulerian] {
            self.fv_config(scheme).validate(problem.t_end)?;
        }
        if self.report_times.is_empty() {
            return Err(Error::InvalidConfig("at least one report time is required".into()));
        }
        if self.comparison_points == 0 {
            return Err(Error::InvalidConfig("comparison_points must be at least 1".into()));
        }
        if let Some(t) = self.oracle_times.iter().find(|&&t| !(0.0..=problem.t_end).contains(&t)) {
            return Err(Error::InvalidConfig(format!("oracle time {t} outside [0, {}]", problem.t_end)));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_defaults() {
        let c = ExperimentConfig::catalog(ProblemId::BurgersRarefaction, Profile::Quick);
        assert_eq!(c.training.n_f, 10_000);
        assert_eq!(c.training.n_u, 100);
        assert_eq!(c.training.width, 40);
        assert_eq!(c.training.viscosity, 0.0);
        assert_eq!(c.fv.dx, 0.01);
        assert_eq!((c.fv.cfl_lax_friedrichs, c.fv.cfl_lagrangian_eulerian), (0.4, 0.2));
        assert_eq!(c.report_times, vec![2.0, 4.0, 6.0, 8.0]);

        let bl = ExperimentConfig::catalog(ProblemId::BlShock, Profile::Full);
        assert_eq!(bl.training.n_f, 1_000_000);
        assert_eq!(bl.training.viscosity, 0.01);
        assert_eq!(bl.report_times, vec![1.0, 2.0, 3.0, 4.0]);
        let shock = ExperimentConfig::catalog(ProblemId::BurgersShock, Profile::Full);
        assert_eq!(shock.training.n_f, 10_000);
        assert_eq!(shock.training.iterations, 20_000);
        for id in ProblemId::ALL {
            for p in [Profile::Quick, Profile::Full] {
                ExperimentConfig::catalog(id, p).validate().unwrap();
            }
        }
    }

    #[test]
    fn toml_round_trip_and_overrides() {
        let c = ExperimentConfig::catalog(ProblemId::BurgersSmooth, Profile::Quick).with_overrides(
            &Overrides {
                width: Some(60),
                seed: Some(2),
                learning_rate: Some(3e-4),
                ..Default::default()
            },
        );
        assert_eq!(c.training.width, 60);
        assert_eq!(c.training.seed, 2);
        let text = c.to_toml();
        assert!(text.contains("problem = \"burgers-smooth\""));
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), c);
        let bad = text.replace("width = 60", "width = 0");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
        let unknown = format!("{text}\nextra = 1\n");
        assert!(ExperimentConfig::from_toml(&unknown).is_err());
    }
}
