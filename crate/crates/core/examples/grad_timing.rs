//! Times one full-batch loss and gradient evaluation.
use std::time::Instant;

use hyperlab::pinn::{loss_and_gradient, loss_f, TrainingConfig};
use hyperlab::problems::ProblemId;

fn main() -> hyperlab::Result<()> {
    let width: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(40);
    let mut config = TrainingConfig::new(ProblemId::BurgersShock.problem());
    config.width = width;
    let points = config.collocation()?;
    let params = config.initial_params()?;
    let flux = config.problem.flux;
    for viscosity in [0.0, 0.01] {
        let reps = 5;
        let start = Instant::now();
        for _ in 0..reps {
            std::hint::black_box(loss_f(&params, &flux, viscosity, &points.interior));
        }
        let fwd = start.elapsed().as_secs_f64() * 1e3 / reps as f64;
        let start = Instant::now();
        for _ in 0..reps {
            std::hint::black_box(loss_and_gradient(&params, &flux, viscosity, &points.interior, &points.initial));
        }
        let full = start.elapsed().as_secs_f64() * 1e3 / reps as f64;
        println!("width {width}, eps {viscosity}: forward {fwd:.1} ms, loss+gradient {full:.1} ms");
    }
    Ok(())
}
