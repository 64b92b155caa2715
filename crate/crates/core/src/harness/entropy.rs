//! Locating steep jumps in a sampled field and testing them for entropy
//! admissibility.

use crate::oracles::{entropy_admissible, ShockCandidate};
use crate::problems::FluxKind;
use crate::Result;

use super::metrics::FieldSource;

/// A jump found in a sampled profile, tracked across two time levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FittedShock {
    pub candidate: ShockCandidate,
    /// Position at the earlier time level.
    pub position_early: f64,
    /// Position at the later time level.
    pub position_late: f64,
}

impl FittedShock {
    /// Rankine-Hugoniot speed of the fitted states.
    pub fn jump_speed(&self, flux: &FluxKind) -> f64 {
        let ShockCandidate { u_left, u_right, .. } = self.candidate;
        (flux.eval(u_left) - flux.eval(u_right)) / (u_left - u_right)
    }

    /// Oleinik test with the Rankine-Hugoniot speed of the fitted states.
    pub fn admissible(&self, flux: &FluxKind) -> bool {
        let candidate = ShockCandidate {
            speed: self.jump_speed(flux),
            ..self.candidate
        };
        entropy_admissible(&candidate, flux)
    }
}

/// Position where the piecewise-linear profile crosses `level` nearest to `near`.
fn crossing_near(xs: &[f64], u: &[f64], level: f64, near: f64) -> Option<f64> {
    (0..xs.len() - 1)
        .filter_map(|i| {
            let (a, b) = (u[i] - level, u[i + 1] - level);
            if a == 0.0 {
                Some(xs[i])
            } else if a * b < 0.0 {
                Some(xs[i] + (xs[i + 1] - xs[i]) * a / (a - b))
            } else {
                None
            }
        })
        .min_by(|p, q| (p - near).abs().total_cmp(&(q - near).abs()))
}

/// Finds every run of neighbouring samples at `t_late` whose difference
/// exceeds `steepness`, takes the states `plateau_offset` samples outside the
/// run as the shock states, and estimates the speed from the mid-level
/// crossing at `t_early` and `t_late`.
pub fn fit_shocks(
    source: &FieldSource<'_>,
    xs: &[f64],
    t_early: f64,
    t_late: f64,
    steepness: f64,
    plateau_offset: usize,
) -> Result<Vec<FittedShock>> {
    let late = source.sample(t_late, xs)?;
    let early = source.sample(t_early, xs)?;
    let n = xs.len();
    let steep: Vec<bool> = late.windows(2).map(|w| (w[1] - w[0]).abs() > steepness).collect();
    let mut shocks = Vec::new();
    let mut i = 0;
    while i < steep.len() {
        if !steep[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < steep.len() && steep[i] {
            i += 1;
        }
        // samples start..=i span the jump
        let left = start.saturating_sub(plateau_offset);
        let right = (i + plateau_offset).min(n - 1);
        let (u_left, u_right) = (late[left], late[right]);
        if u_left == u_right {
            continue;
        }
        let level = 0.5 * (u_left + u_right);
        let centre = 0.5 * (xs[start] + xs[i]);
        let position_late = crossing_near(xs, &late, level, centre).unwrap_or(centre);
        let position_early = crossing_near(xs, &early, level, position_late).unwrap_or(position_late);
        let speed = (position_late - position_early) / (t_late - t_early);
        shocks.push(FittedShock {
            candidate: ShockCandidate {
                u_left,
                u_right,
                speed,
            },
            position_early,
            position_late,
        });
    }
    Ok(shocks)
}
