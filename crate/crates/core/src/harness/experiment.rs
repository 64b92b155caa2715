use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::fv::{self, GridSolution, SchemeKind};
use crate::oracles::ExactSolution;
use crate::pinn::{equispaced, MlpParams};
use crate::{Error, Result};

use super::config::ExperimentConfig;
use super::csvio;
use super::metrics::{error_vs_reference, ErrorSeries, FieldSource};

/// Network error against the exact solution at the oracle times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSeries {
    pub times: Vec<f64>,
    pub error: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalLosses {
    pub loss_f: f64,
    pub loss_u: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub train_seconds: f64,
    pub lax_friedrichs_seconds: f64,
    pub lagrangian_eulerian_seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Artifacts {
    pub lax_friedrichs: Option<PathBuf>,
    pub lagrangian_eulerian: Option<PathBuf>,
    pub network_samples: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub errors: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

/// Machine-readable part of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportData {
    pub config: ExperimentConfig,
    pub errors: ErrorSeries,
    pub oracle: OracleSeries,
    pub losses: FinalLosses,
    pub timings: Timings,
    pub artifacts: Artifacts,
}

/// Outcome of one experiment, with the trained network and both references
/// kept in memory.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub data: ReportData,
    pub params: MlpParams,
    pub lax_friedrichs: GridSolution,
    pub lagrangian_eulerian: GridSolution,
    pub loss_history: Vec<f64>,
}

const MACHINE_FENCE: &str = "```toml";

impl ReportData {
    /// Human-readable summary followed by a fenced TOML block.
    pub fn to_markdown(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        writeln!(out, "# Experiment `{}` ({} profile)\n", c.problem, c.profile).unwrap();
        writeln!(
            out,
            "Network: 9 x {} tanh, N_f = {}, N_u = {}, viscosity = {}, seed = {}, {} Adam iterations (lr {}).",
            c.training.width,
            c.training.n_f,
            c.training.n_u,
            c.training.viscosity,
            c.training.seed,
            c.training.iterations,
            c.training.learning_rate
        )
        .unwrap();
        writeln!(
            out,
            "References: dx = {}, Lax-Friedrichs CFL {}, Lagrangian-Eulerian CFL {}.\n",
            c.fv.dx, c.fv.cfl_lax_friedrichs, c.fv.cfl_lagrangian_eulerian
        )
        .unwrap();
        writeln!(out, "| t | ELF | EEL |\n|---|---|---|").unwrap();
        for ((t, elf), eel) in self.errors.times.iter().zip(&self.errors.elf).zip(&self.errors.eel) {
            writeln!(out, "| {t} | {elf:.3e} | {eel:.3e} |").unwrap();
        }
        writeln!(out, "\n| t | error vs exact |\n|---|---|").unwrap();
        for (t, e) in self.oracle.times.iter().zip(&self.oracle.error) {
            writeln!(out, "| {t} | {e:.3e} |").unwrap();
        }
        writeln!(
            out,
            "\nFinal losses: L_f = {:.3e}, L_u = {:.3e}. Training took {:.1} s.\n",
            self.losses.loss_f, self.losses.loss_u, self.timings.train_seconds
        )
        .unwrap();
        writeln!(out, "{MACHINE_FENCE}").unwrap();
        out.push_str(&toml::to_string(self).expect("report serializes"));
        writeln!(out, "```").unwrap();
        out
    }

    /// Parses the fenced TOML block of a report written by [`ReportData::to_markdown`].
    pub fn from_markdown(text: &str) -> Result<Self> {
        let start = text
            .find(MACHINE_FENCE)
            .ok_or_else(|| Error::Parse("report has no machine-readable section".into()))?
            + MACHINE_FENCE.len();
        let end = text[start..]
            .find("```")
            .ok_or_else(|| Error::Parse("unterminated machine-readable section".into()))?
            + start;
        let data: ReportData =
            toml::from_str(&text[start..end]).map_err(|e| Error::Parse(e.to_string()))?;
        data.config.validate()?;
        Ok(data)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_markdown(&std::fs::read_to_string(path)?)
    }
}

/// Trains the network, runs both finite-volume references and evaluates the
/// error series. Artifacts are written when `out_dir` is given.
pub fn run_experiment(config: &ExperimentConfig, out_dir: Option<&Path>) -> Result<ExperimentReport> {
    run_experiment_with_progress(config, out_dir, |_, _| {})
}

pub fn run_experiment_with_progress(
    config: &ExperimentConfig,
    out_dir: Option<&Path>,
    progress: impl FnMut(usize, &crate::pinn::LossBreakdown) + Send,
) -> Result<ExperimentReport> {
    config.validate()?;
    let problem = config.problem.problem();
    let training = config.training_config();

    let timed_fv = |scheme| -> Result<(GridSolution, f64)> {
        let start = Instant::now();
        let sol = fv::solve(&problem, &config.fv_config(scheme))?;
        Ok((sol, start.elapsed().as_secs_f64()))
    };
    let (trained, (lf, le)) = rayon::join(
        || {
            let start = Instant::now();
            crate::pinn::train_with_progress(&training, progress)
                .map(|out| (out, start.elapsed().as_secs_f64()))
        },
        || {
            rayon::join(
                || timed_fv(SchemeKind::LaxFriedrichs),
                || timed_fv(SchemeKind::LagrangianEulerian),
            )
        },
    );
    let (outcome, train_seconds) = trained?;
    let (lf, lf_seconds) = lf?;
    let (le, le_seconds) = le?;

    let xs = equispaced(problem.x_min, problem.x_max, config.comparison_points);
    let network = FieldSource::Network(&outcome.params);
    let errors = ErrorSeries::compute(
        &network,
        &FieldSource::Grid(&lf),
        &FieldSource::Grid(&le),
        &config.report_times,
        &xs,
    )?;
    let mut oracle = OracleSeries {
        times: vec![],
        error: vec![],
    };
    if let Some(exact) = ExactSolution::for_problem(&problem) {
        let exact = FieldSource::Exact(exact);
        for &t in &config.oracle_times {
            oracle.times.push(t);
            oracle
                .error
                .push(error_vs_reference(&network.sample(t, &xs)?, &exact.sample(t, &xs)?)?);
        }
    }

    let mut data = ReportData {
        config: config.clone(),
        errors,
        oracle,
        losses: FinalLosses {
            loss_f: outcome.final_losses.loss_f,
            loss_u: outcome.final_losses.loss_u,
            iterations: training.optimizer.iterations,
        },
        timings: Timings {
            train_seconds,
            lax_friedrichs_seconds: lf_seconds,
            lagrangian_eulerian_seconds: le_seconds,
        },
        artifacts: Artifacts::default(),
    };
    if let Some(dir) = out_dir {
        data.artifacts = write_artifacts(dir, &data, &outcome.params, &lf, &le)?;
    }
    Ok(ExperimentReport {
        data,
        params: outcome.params,
        lax_friedrichs: lf,
        lagrangian_eulerian: le,
        loss_history: outcome.loss_history,
    })
}

fn write_artifacts(
    dir: &Path,
    data: &ReportData,
    params: &MlpParams,
    lf: &GridSolution,
    le: &GridSolution,
) -> Result<Artifacts> {
    std::fs::create_dir_all(dir)?;
    let artifacts = Artifacts {
        lax_friedrichs: Some(dir.join("lax_friedrichs.csv")),
        lagrangian_eulerian: Some(dir.join("lagrangian_eulerian.csv")),
        network_samples: Some(dir.join("network.csv")),
        checkpoint: Some(dir.join("network.ckpt")),
        errors: Some(dir.join("errors.csv")),
        report: Some(dir.join("report.md")),
    };
    csvio::save_solution(lf, artifacts.lax_friedrichs.as_ref().unwrap())?;
    csvio::save_solution(le, artifacts.lagrangian_eulerian.as_ref().unwrap())?;
    // network sampled on the finite-volume cell centres
    let mut sampled = le.clone();
    for (n, &t) in le.times.iter().enumerate() {
        for (j, &x) in le.x_centers.iter().enumerate() {
            sampled.values[[n, j]] = params.forward(x, t);
        }
    }
    csvio::save_solution(&sampled, artifacts.network_samples.as_ref().unwrap())?;
    params.save(artifacts.checkpoint.as_ref().unwrap())?;
    csvio::write_errors(
        &data.errors,
        std::fs::File::create(artifacts.errors.as_ref().unwrap())?,
    )?;
    let mut with_paths = data.clone();
    with_paths.artifacts = artifacts.clone();
    std::fs::write(artifacts.report.as_ref().unwrap(), with_paths.to_markdown())?;
    Ok(artifacts)
}
