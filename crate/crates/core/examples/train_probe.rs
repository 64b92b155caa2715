//! Trains one catalog experiment and prints EEL and the exact-solution error
//! every few hundred iterations.
//!
//! `train_probe <problem> [iterations] [seed] [every]`

use hyperlab::fv::{solve, SchemeKind};
use hyperlab::harness::{error_vs_reference, ExperimentConfig, FieldSource, Overrides, Profile};
use hyperlab::oracles::ExactSolution;
use hyperlab::pinn::{equispaced, loss_and_gradient, Adam};

fn main() -> hyperlab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let id = args.first().map(String::as_str).unwrap_or("bl-shock").parse()?;
    let arg = |i: usize, d: u64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let config = ExperimentConfig::catalog(id, Profile::Quick).with_overrides(&Overrides {
        iterations: Some(arg(1, 6000) as usize),
        seed: Some(arg(2, 0)),
        ..Default::default()
    });
    let every = arg(3, 500) as usize;
    let problem = id.problem();
    let le = solve(&problem, &config.fv_config(SchemeKind::LagrangianEulerian))?;
    let exact = ExactSolution::for_problem(&problem).unwrap();
    let xs = equispaced(problem.x_min, problem.x_max, 100);

    let training = config.training_config();
    let points = training.collocation()?;
    let mut params = training.initial_params()?;
    let mut adam = Adam::new(training.optimizer, params.len());
    let start = std::time::Instant::now();
    for it in 0..=training.optimizer.iterations {
        let (losses, grad) =
            loss_and_gradient(&params, &problem.flux, training.viscosity, &points.interior, &points.initial);
        if it % every == 0 {
            let net = FieldSource::Network(&params);
            let eel: Vec<String> = config
                .report_times
                .iter()
                .map(|&t| {
                    let e = error_vs_reference(&net.sample(t, &xs).unwrap(), &FieldSource::Grid(&le).sample(t, &xs).unwrap());
                    format!("{:.2e}", e.unwrap())
                })
                .collect();
            let oracle: Vec<String> = config
                .oracle_times
                .iter()
                .map(|&t| {
                    let e = error_vs_reference(&net.sample(t, &xs).unwrap(), &FieldSource::Exact(exact).sample(t, &xs).unwrap());
                    format!("{:.2e}", e.unwrap())
                })
                .collect();
            println!(
                "{it:>6} {:>6.0}s L_f {:.3e} L_u {:.3e} EEL [{}] exact [{}]",
                start.elapsed().as_secs_f64(),
                losses.loss_f,
                losses.loss_u,
                eel.join(" "),
                oracle.join(" ")
            );
        }
        if it < training.optimizer.iterations {
            adam.step(params.as_mut_slice(), &grad);
        }
    }
    Ok(())
}
