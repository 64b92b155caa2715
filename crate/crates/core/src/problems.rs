//! Flux functions, initial data and the built-in problem catalog.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Names accepted by [`ProblemId::from_str`], in catalog order.
pub const CATALOG: [&str; 4] = [
    "burgers-rarefaction",
    "burgers-shock",
    "burgers-smooth",
    "bl-shock",
];

/// Flux function `H(u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FluxKind {
    /// `H(u) = u^2 / 2`.
    Burgers,
    /// `H(u) = u^2 / (u^2 + a (1 - u)^2)`, non-convex with one inflection point.
    BuckleyLeverett { a: f64 },
}

impl FluxKind {
    /// Buckley-Leverett flux with mobility ratio `a`. Any `a > 0` is accepted.
    pub fn buckley_leverett(a: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "Buckley-Leverett parameter must be positive, got {a}"
            )));
        }
        Ok(FluxKind::BuckleyLeverett { a })
    }

    /// `H(u)`.
    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            FluxKind::Burgers => 0.5 * u * u,
            FluxKind::BuckleyLeverett { a } => {
                let w = 1.0 - u;
                u * u / (u * u + a * w * w)
            }
        }
    }

    /// `H'(u)`, the characteristic speed.
    pub fn deriv(&self, u: f64) -> f64 {
        match *self {
            FluxKind::Burgers => u,
            FluxKind::BuckleyLeverett { a } => {
                let w = 1.0 - u;
                let den = u * u + a * w * w;
                2.0 * a * u * w / (den * den)
            }
        }
    }

    /// `H''(u)`, needed when differentiating `H'(u) u_x` with respect to `u`.
    pub fn second_deriv(&self, u: f64) -> f64 {
        match *self {
            FluxKind::Burgers => 1.0,
            FluxKind::BuckleyLeverett { a } => {
                // H' = N / D^2 with N = 2a u (1 - u), D = u^2 + a (1 - u)^2.
                let w = 1.0 - u;
                let den = u * u + a * w * w;
                let num = 2.0 * a * u * w;
                let dnum = 2.0 * a * (1.0 - 2.0 * u);
                let dden = 2.0 * u - 2.0 * a * w;
                (dnum * den - 2.0 * num * dden) / (den * den * den)
            }
        }
    }
}

/// Initial datum `u_0(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialCondition {
    /// `1` for `x <= 0`, `0` for `x > 0`.
    Shock,
    /// `-1` for `x <= 0`, `1` for `x > 0`.
    RarefactionFan,
    /// `0.5 + sin(x)`.
    Smooth,
}

impl InitialCondition {
    /// Evaluates `u_0(x)`. At the jump `x = 0` the left state is returned.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            InitialCondition::Shock => {
                if x <= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            InitialCondition::RarefactionFan => {
                if x <= 0.0 {
                    -1.0
                } else {
                    1.0
                }
            }
            InitialCondition::Smooth => 0.5 + x.sin(),
        }
    }

    /// Closed interval containing every value of the datum.
    pub fn range(&self) -> (f64, f64) {
        match self {
            InitialCondition::Shock => (0.0, 1.0),
            InitialCondition::RarefactionFan => (-1.0, 1.0),
            InitialCondition::Smooth => (-0.5, 1.5),
        }
    }
}

/// Identifier of a built-in problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemId {
    BurgersRarefaction,
    BurgersShock,
    BurgersSmooth,
    BlShock,
}

impl ProblemId {
    pub const ALL: [ProblemId; 4] = [
        ProblemId::BurgersRarefaction,
        ProblemId::BurgersShock,
        ProblemId::BurgersSmooth,
        ProblemId::BlShock,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemId::BurgersRarefaction => CATALOG[0],
            ProblemId::BurgersShock => CATALOG[1],
            ProblemId::BurgersSmooth => CATALOG[2],
            ProblemId::BlShock => CATALOG[3],
        }
    }

    pub fn problem(self) -> ConservationLawProblem {
        let burgers = |ic| ConservationLawProblem {
            flux: FluxKind::Burgers,
            ic,
            x_min: -10.0,
            x_max: 10.0,
            t_end: 8.0,
        };
        match self {
            ProblemId::BurgersRarefaction => burgers(InitialCondition::RarefactionFan),
            ProblemId::BurgersShock => burgers(InitialCondition::Shock),
            ProblemId::BurgersSmooth => burgers(InitialCondition::Smooth),
            ProblemId::BlShock => ConservationLawProblem {
                flux: FluxKind::BuckleyLeverett { a: 1.0 },
                ic: InitialCondition::Shock,
                x_min: -8.0,
                x_max: 8.0,
                t_end: 8.0,
            },
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::UnknownProblem(s.to_string()))
    }
}

/// Cauchy problem `u_t + H(u)_x = 0`, `u(x, 0) = u_0(x)` restricted to a
/// finite window `[x_min, x_max] x [0, t_end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservationLawProblem {
    pub flux: FluxKind,
    pub ic: InitialCondition,
    pub x_min: f64,
    pub x_max: f64,
    pub t_end: f64,
}

impl ConservationLawProblem {
    pub fn new(
        flux: FluxKind,
        ic: InitialCondition,
        x_min: f64,
        x_max: f64,
        t_end: f64,
    ) -> Result<Self> {
        let problem = ConservationLawProblem {
            flux,
            ic,
            x_min,
            x_max,
            t_end,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_min < self.x_max) {
            return Err(Error::InvalidConfig(format!(
                "empty spatial domain [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "final time must be positive, got {}",
                self.t_end
            )));
        }
        if let FluxKind::BuckleyLeverett { a } = self.flux {
            FluxKind::buckley_leverett(a)?;
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }
}

/// Looks up a catalog problem by name.
pub fn catalog(name: &str) -> Result<ConservationLawProblem> {
    Ok(name.parse::<ProblemId>()?.problem())
}
