use thiserror::Error;

use crate::problems::CATALOG;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown problem `{0}`; available problems: {list}", list = CATALOG.join(", "))]
    UnknownProblem(String),

    #[error("finite-volume solver diverged at t = {time}")]
    SolverDiverged { time: f64 },

    #[error("training diverged at iteration {iteration} (loss = {loss})")]
    TrainingDiverged { iteration: usize, loss: f64 },

    #[error("exact smooth solution requested at t = {t}, at or beyond the first shock time {horizon}")]
    HorizonExceeded { t: f64, horizon: f64 },

    #[error("length mismatch: {left} values vs {right} values")]
    LengthMismatch { left: usize, right: usize },

    #[error("time {0} is not among the recorded times")]
    TimeNotRecorded(f64),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
