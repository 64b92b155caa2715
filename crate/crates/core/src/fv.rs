//! Conservative finite-volume schemes
//!
//! ```text
//! U_j^{n+1} = U_j^n - (k/h) [F(U_j, U_{j+1}) - F(U_{j-1}, U_j)]
//! ```
//!
//! with either the Lax-Friedrichs or the Lagrangian-Eulerian interface flux.
//! Both are monotone when `max |H'| k/h < 1/2`. The domain is closed with one
//! ghost cell per side that copies the boundary cell (zero-gradient outflow).

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::problems::{ConservationLawProblem, FluxKind};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    LaxFriedrichs,
    LagrangianEulerian,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::LaxFriedrichs => "lax-friedrichs",
            SchemeKind::LagrangianEulerian => "lagrangian-eulerian",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lax-friedrichs" | "lf" => Ok(SchemeKind::LaxFriedrichs),
            "lagrangian-eulerian" | "le" => Ok(SchemeKind::LagrangianEulerian),
            _ => Err(Error::InvalidConfig(format!(
                "unknown scheme `{s}`; expected lax-friedrichs (lf) or lagrangian-eulerian (le)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FvConfig {
    pub dx: f64,
    pub cfl_number: f64,
    pub scheme: SchemeKind,
    pub record_times: Vec<f64>,
}

impl FvConfig {
    pub fn validate(&self, t_end: f64) -> Result<()> {
        if !(self.dx.is_finite() && self.dx > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "cell width must be positive, got {}",
                self.dx
            )));
        }
        if !(self.cfl_number > 0.0 && self.cfl_number < 0.5) {
            return Err(Error::InvalidConfig(format!(
                "CFL number must lie in (0, 0.5), got {}",
                self.cfl_number
            )));
        }
        if self.record_times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "record times must be strictly increasing".into(),
            ));
        }
        if let Some(&t) = self
            .record_times
            .iter()
            .find(|&&t| !(0.0..=t_end).contains(&t))
        {
            return Err(Error::InvalidConfig(format!(
                "record time {t} outside [0, {t_end}]"
            )));
        }
        Ok(())
    }
}

/// Cell-centred values at a set of recorded time levels.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSolution {
    pub x_centers: Vec<f64>,
    pub times: Vec<f64>,
    /// `values[[n, j]]` is the value of cell `j` at `times[n]`.
    pub values: Array2<f64>,
}

impl GridSolution {
    pub fn level_index(&self, t: f64) -> Result<usize> {
        let tol = 1e-9 * t.abs().max(1.0);
        self.times
            .iter()
            .position(|&s| (s - t).abs() <= tol)
            .ok_or(Error::TimeNotRecorded(t))
    }

    pub fn level(&self, t: f64) -> Result<&[f64]> {
        let n = self.level_index(t)?;
        Ok(self
            .values
            .row(n)
            .to_slice()
            .expect("solution rows are contiguous"))
    }

    /// Linear interpolation between cell centres; constant beyond the outer centres.
    pub fn interpolate(&self, t: f64, x: f64) -> Result<f64> {
        let row = self.level(t)?;
        Ok(interpolate_uniform(&self.x_centers, row, x))
    }
}

pub(crate) fn interpolate_uniform(centers: &[f64], values: &[f64], x: f64) -> f64 {
    let n = centers.len();
    if n == 1 || x <= centers[0] {
        return values[0];
    }
    if x >= centers[n - 1] {
        return values[n - 1];
    }
    let h = (centers[n - 1] - centers[0]) / (n - 1) as f64;
    let s = (x - centers[0]) / h;
    let j = (s.floor() as usize).min(n - 2);
    let w = s - j as f64;
    (1.0 - w) * values[j] + w * values[j + 1]
}

/// Interface flux `F(u_left, u_right)`; `h_over_k` is `dx / dt`.
pub fn numerical_flux(
    scheme: SchemeKind,
    flux: &FluxKind,
    u_left: f64,
    u_right: f64,
    h_over_k: f64,
) -> f64 {
    let diffusion = h_over_k * (u_left - u_right);
    let central = flux.eval(u_right) + flux.eval(u_left);
    match scheme {
        SchemeKind::LaxFriedrichs => 0.5 * (diffusion + central),
        SchemeKind::LagrangianEulerian => 0.25 * (diffusion + 2.0 * central),
    }
}

/// Largest stable step `k = cfl * dx / max_j |H'(U_j)|`.
///
/// A state with zero characteristic speed everywhere falls back to
/// `k = cfl * dx`. Non-finite cell values are reported as divergence at
/// time `t`.
pub fn cfl_timestep(flux: &FluxKind, u: &[f64], dx: f64, cfl_number: f64, t: f64) -> Result<f64> {
    let mut max_speed = 0.0f64;
    for &v in u {
        if !v.is_finite() {
            return Err(Error::SolverDiverged { time: t });
        }
        max_speed = max_speed.max(flux.deriv(v).abs());
    }
    if max_speed > 0.0 {
        Ok(cfl_number * dx / max_speed)
    } else {
        Ok(cfl_number * dx)
    }
}

/// Interface fluxes `F_{j-1/2}` for `j = 0..=n`, ghost cells included.
pub fn interface_fluxes(scheme: SchemeKind, flux: &FluxKind, u: &[f64], h_over_k: f64) -> Vec<f64> {
    let n = u.len();
    let mut faces = Vec::with_capacity(n + 1);
    // left ghost copies u[0]
    faces.push(numerical_flux(scheme, flux, u[0], u[0], h_over_k));
    for j in 1..n {
        faces.push(numerical_flux(scheme, flux, u[j - 1], u[j], h_over_k));
    }
    faces.push(numerical_flux(scheme, flux, u[n - 1], u[n - 1], h_over_k));
    faces
}

/// One conservative update of all cells with time step `k`.
pub fn step(scheme: SchemeKind, flux: &FluxKind, u: &[f64], dx: f64, k: f64) -> Vec<f64> {
    let faces = interface_fluxes(scheme, flux, u, dx / k);
    let ratio = k / dx;
    u.iter()
        .zip(faces.windows(2))
        .map(|(&uj, f)| uj - ratio * (f[1] - f[0]))
        .collect()
}

/// Cell centres of the uniform grid covering `[x_min, x_max]` with width close to `dx`.
pub fn cell_centers(problem: &ConservationLawProblem, dx: f64) -> (Vec<f64>, f64) {
    let cells = (problem.length() / dx).round().max(1.0) as usize;
    let h = problem.length() / cells as f64;
    let centers = (0..cells)
        .map(|j| problem.x_min + (j as f64 + 0.5) * h)
        .collect();
    (centers, h)
}

/// Marches from `t = 0` to the last record time (or `t_end` when none are
/// given), storing a snapshot at each record time.
pub fn solve(problem: &ConservationLawProblem, config: &FvConfig) -> Result<GridSolution> {
    problem.validate()?;
    config.validate(problem.t_end)?;
    let (x_centers, h) = cell_centers(problem, config.dx);
    let mut u: Vec<f64> = x_centers.iter().map(|&x| problem.ic.eval(x)).collect();

    let record_times = if config.record_times.is_empty() {
        vec![problem.t_end]
    } else {
        config.record_times.clone()
    };
    let mut values = Array2::zeros((record_times.len(), u.len()));
    let mut t = 0.0;
    for (n, &stop) in record_times.iter().enumerate() {
        while t < stop {
            let k = cfl_timestep(&problem.flux, &u, h, config.cfl_number, t)?;
            // land exactly on the record time
            let (k, next) = if t + k >= stop * (1.0 - 1e-14) {
                (stop - t, stop)
            } else {
                (k, t + k)
            };
            u = step(config.scheme, &problem.flux, &u, h, k);
            t = next;
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::SolverDiverged { time: t });
        }
        values.row_mut(n).assign(&ndarray::ArrayView1::from(&u));
    }
    Ok(GridSolution {
        x_centers,
        times: record_times,
        values,
    })
}
