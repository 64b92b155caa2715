//! Exact entropy solutions of the catalog problems and an Oleinik
//! shock-admissibility test.
//!
//! These are the reference every solver in the crate is checked against, so
//! nothing here depends on the finite-volume or network code.

use crate::problems::{ConservationLawProblem, FluxKind, InitialCondition};
use crate::{Error, Result};

/// First shock time of Burgers with `u_0 = 0.5 + sin x`: `-1 / min cos = 1`.
pub const SMOOTH_SHOCK_TIME: f64 = 1.0;

const BISECTION_TOL: f64 = 1e-12;

/// Burgers with `1 | 0` Riemann data: a shock moving at `s = 1/2`.
pub fn exact_burgers_shock(x: f64, t: f64) -> f64 {
    if x <= 0.5 * t {
        1.0
    } else {
        0.0
    }
}

/// Burgers with `-1 | 1` Riemann data: the centred fan `u = x/t`.
pub fn exact_burgers_rarefaction(x: f64, t: f64) -> f64 {
    if x <= -t {
        -1.0
    } else if x >= t {
        1.0
    } else {
        x / t
    }
}

/// Burgers with `u_0 = 0.5 + sin x`, valid before the first shock (`t < 1`).
///
/// Solves the characteristic equation `u = 0.5 + sin(x - u t)` by Newton's
/// method kept inside a shrinking bracket.
pub fn exact_burgers_smooth(x: f64, t: f64) -> Result<f64> {
    if t >= SMOOTH_SHOCK_TIME {
        return Err(Error::HorizonExceeded {
            t,
            horizon: SMOOTH_SHOCK_TIME,
        });
    }
    let residual = |u: f64| u - 0.5 - (x - u * t).sin();
    // residual is increasing in u for t < 1
    let (mut lo, mut hi) = (-0.5 - 1e-9, 1.5 + 1e-9);
    let mut u = 0.5 + x.sin();
    for _ in 0..200 {
        let r = residual(u);
        if r.abs() <= 1e-14 {
            break;
        }
        if r > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        let slope = 1.0 + t * (x - u * t).cos();
        let newton = u - r / slope;
        u = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(u)
}

/// Post-shock state `u*` and shock speed `sigma` of the Buckley-Leverett
/// `1 | 0` Riemann problem, from the tangency condition `H'(u*) = H(u*)/u*`.
pub fn welge_state(a: f64) -> (f64, f64) {
    let flux = FluxKind::BuckleyLeverett { a };
    // g(u) = u H'(u) - H(u) is positive below u* and negative above it.
    let g = |u: f64| u * flux.deriv(u) - flux.eval(u);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u_star = 0.5 * (lo + hi);
    (u_star, flux.eval(u_star) / u_star)
}

/// Buckley-Leverett with `1 | 0` Riemann data: a rarefaction from `u = 1`
/// down to `u*` followed by a shock to `0` at speed `sigma`.
pub fn exact_bl(x: f64, t: f64, a: f64) -> f64 {
    if t <= 0.0 {
        return InitialCondition::Shock.eval(x);
    }
    let (u_star, sigma) = welge_state(a);
    let xi = x / t;
    // H'(1) = 0
    if xi <= 0.0 {
        return 1.0;
    }
    if xi > sigma {
        return 0.0;
    }
    // H' decreases from sigma to 0 on [u*, 1]
    let flux = FluxKind::BuckleyLeverett { a };
    let (mut lo, mut hi) = (u_star, 1.0);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if flux.deriv(mid) > xi {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Which exact solution applies to a problem, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExactSolution {
    BurgersShock,
    BurgersRarefaction,
    /// Valid only for `t < SMOOTH_SHOCK_TIME`.
    BurgersSmooth,
    BuckleyLeverett { a: f64 },
}

impl ExactSolution {
    pub fn for_problem(problem: &ConservationLawProblem) -> Option<Self> {
        match (problem.flux, problem.ic) {
            (FluxKind::Burgers, InitialCondition::Shock) => Some(ExactSolution::BurgersShock),
            (FluxKind::Burgers, InitialCondition::RarefactionFan) => {
                Some(ExactSolution::BurgersRarefaction)
            }
            (FluxKind::Burgers, InitialCondition::Smooth) => Some(ExactSolution::BurgersSmooth),
            (FluxKind::BuckleyLeverett { a }, InitialCondition::Shock) => {
                Some(ExactSolution::BuckleyLeverett { a })
            }
            _ => None,
        }
    }

    /// Last time (exclusive) at which [`ExactSolution::eval`] succeeds.
    pub fn horizon(&self) -> f64 {
        match self {
            ExactSolution::BurgersSmooth => SMOOTH_SHOCK_TIME,
            _ => f64::INFINITY,
        }
    }

    pub fn eval(&self, x: f64, t: f64) -> Result<f64> {
        match *self {
            ExactSolution::BurgersShock => Ok(exact_burgers_shock(x, t)),
            ExactSolution::BurgersRarefaction => Ok(exact_burgers_rarefaction(x, t)),
            ExactSolution::BurgersSmooth => exact_burgers_smooth(x, t),
            ExactSolution::BuckleyLeverett { a } => Ok(exact_bl(x, t, a)),
        }
    }
}

/// A discontinuity joining `u_left` to `u_right` moving at `speed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockCandidate {
    pub u_left: f64,
    pub u_right: f64,
    pub speed: f64,
}

/// Oleinik chord condition: for every `v` strictly between the two states,
///
/// ```text
/// (H(v) - H(u_left)) / (v - u_left)  >=  speed  >=  (H(v) - H(u_right)) / (v - u_right)
/// ```
///
/// checked on 1000 interior points with tolerance `1e-10`. Equal states are
/// not a shock and are rejected.
pub fn entropy_admissible(candidate: &ShockCandidate, flux: &FluxKind) -> bool {
    const GRID: usize = 1000;
    const TOL: f64 = 1e-10;
    let ShockCandidate {
        u_left,
        u_right,
        speed,
    } = *candidate;
    if u_left == u_right {
        return false;
    }
    let (h_left, h_right) = (flux.eval(u_left), flux.eval(u_right));
    (1..=GRID).all(|i| {
        let v = u_left + (u_right - u_left) * i as f64 / (GRID + 1) as f64;
        let h = flux.eval(v);
        let left_chord = (h - h_left) / (v - u_left);
        let right_chord = (h - h_right) / (v - u_right);
        left_chord >= speed - TOL && speed >= right_chord - TOL
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn burgers_shock_values() {
        assert_eq!(exact_burgers_shock(0.4, 1.0), 1.0);
        assert_eq!(exact_burgers_shock(0.6, 1.0), 0.0);
        for x in [-2.0, -0.1, 0.0, 0.1, 3.0] {
            assert_eq!(exact_burgers_shock(x, 0.0), InitialCondition::Shock.eval(x));
        }
    }

    #[test]
    fn burgers_rarefaction_values() {
        assert_eq!(exact_burgers_rarefaction(0.0, 3.0), 0.0);
        assert_eq!(exact_burgers_rarefaction(0.5, 1.0), 0.5);
        assert_eq!(exact_burgers_rarefaction(-3.0, 2.0), -1.0);
    }

    #[test]
    fn burgers_smooth_values() {
        for x in [-7.0, -1.0, 0.0, 2.5] {
            assert_eq!(exact_burgers_smooth(x, 0.0).unwrap(), 0.5 + f64::sin(x));
        }
        // the characteristic from x0 = 0 carries u = 0.5
        let u = exact_burgers_smooth(0.25, 0.5).unwrap();
        assert!((u - 0.5).abs() < 1e-12);
        assert!(matches!(
            exact_burgers_smooth(0.0, 1.0),
            Err(Error::HorizonExceeded { .. })
        ));
    }

    #[test]
    fn welge_state_unit_mobility() {
        let (u_star, sigma) = welge_state(1.0);
        // tangency for a = 1 reduces to 2 u^2 = 1
        assert!((u_star - 0.5f64.sqrt()).abs() < 1e-10);
        assert!((sigma - (1.0 + 2.0f64.sqrt()) / 2.0).abs() < 1e-10);
        assert!((sigma - 1.20711).abs() < 1e-5);
    }

    #[test]
    fn bl_values() {
        assert_eq!(exact_bl(-1.0, 1.0, 1.0), 1.0);
        assert_eq!(exact_bl(2.0, 1.0, 1.0), 0.0);
        let (u_star, sigma) = welge_state(1.0);
        let just_behind = exact_bl(sigma * 2.0 - 1e-9, 2.0, 1.0);
        assert!((just_behind - u_star).abs() < 1e-6);
        // rarefaction branch inverts H'
        let flux = FluxKind::BuckleyLeverett { a: 1.0 };
        let u = exact_bl(0.6, 1.0, 1.0);
        assert!((flux.deriv(u) - 0.6).abs() < 1e-9);
    }

    #[test]
    fn admissibility_examples() {
        let burgers = FluxKind::Burgers;
        let shock = ShockCandidate {
            u_left: 1.0,
            u_right: 0.0,
            speed: 0.5,
        };
        assert!(entropy_admissible(&shock, &burgers));
        let expansion = ShockCandidate {
            u_left: -1.0,
            u_right: 1.0,
            speed: 0.0,
        };
        assert!(!entropy_admissible(&expansion, &burgers));
        let (u_star, sigma) = welge_state(1.0);
        let bl = FluxKind::BuckleyLeverett { a: 1.0 };
        let welge = ShockCandidate {
            u_left: u_star,
            u_right: 0.0,
            speed: sigma,
        };
        assert!(entropy_admissible(&welge, &bl));
        // jumping all the way from 1 to 0 in one shock crosses the flux graph
        let full = ShockCandidate {
            u_left: 1.0,
            u_right: 0.0,
            speed: bl.eval(1.0),
        };
        assert!(!entropy_admissible(&full, &bl));
        // a Burgers shock with the wrong speed is not admissible either
        let fast = ShockCandidate { speed: 1.5, ..shock };
        assert!(!entropy_admissible(&fast, &burgers));
    }

    #[test]
    fn exact_solution_dispatch() {
        use crate::problems::ProblemId;
        for id in ProblemId::ALL {
            let sol = ExactSolution::for_problem(&id.problem()).unwrap();
            assert_eq!(sol.horizon().is_finite(), id == ProblemId::BurgersSmooth);
        }
    }

    proptest! {
        #[test]
        fn rarefaction_self_similar(x in -20.0f64..20.0, t in 0.01f64..10.0, lambda in 0.1f64..10.0) {
            let a = exact_burgers_rarefaction(lambda * x, lambda * t);
            let b = exact_burgers_rarefaction(x, t);
            prop_assert!((a - b).abs() <= 1e-14);
        }

        #[test]
        fn smooth_newton_residual(x in -10.0f64..10.0, t in 0.0f64..0.999) {
            let u = exact_burgers_smooth(x, t).unwrap();
            prop_assert!((u - 0.5 - (x - u * t).sin()).abs() <= 1e-12);
            prop_assert!((-0.5..=1.5).contains(&u));
        }

        #[test]
        fn bl_monotone_in_x(t in 0.1f64..8.0, a in 0.3f64..1.5) {
            let mut prev = f64::INFINITY;
            for i in 0..400 {
                let x = -8.0 + 16.0 * i as f64 / 399.0;
                let u = exact_bl(x, t, a);
                prop_assert!((0.0..=1.0).contains(&u));
                prop_assert!(u <= prev + 1e-12);
                prev = u;
            }
        }
    }
}
