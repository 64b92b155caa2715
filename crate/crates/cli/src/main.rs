//! `hyperlab` command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hyperlab::fv::{self, FvConfig, GridSolution, SchemeKind};
use hyperlab::harness::csvio;
use hyperlab::harness::{
    error_vs_reference, run_experiment_with_progress, ExperimentConfig, FieldSource, Overrides,
    Profile,
};
use hyperlab::oracles::ExactSolution;
use hyperlab::pinn::{equispaced, train_with_progress, AdamConfig, MlpParams, TrainingConfig};
use hyperlab::problems::ProblemId;
use hyperlab::{Error, Result};

#[derive(Parser)]
#[command(name = "hyperlab", version, about = "Finite-volume and PINN solvers for 1D conservation laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a finite-volume scheme and write the recorded levels as `t,x,u`.
    SolveFv(SolveFvArgs),
    /// Train a network and write its checkpoint.
    Train(TrainArgs),
    /// Evaluate the exact solution on cell centres as `t,x,u`.
    Oracle(OracleArgs),
    /// Mean squared difference between two solutions at common times.
    Compare(CompareArgs),
    /// Run a catalog experiment and write its artifacts and report.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct SolveFvArgs {
    /// Catalog problem name.
    problem: ProblemId,
    /// lax-friedrichs (lf) or lagrangian-eulerian (le).
    #[arg(long, default_value = "lagrangian-eulerian")]
    scheme: SchemeKind,
    #[arg(long, default_value_t = 0.01)]
    dx: f64,
    /// Defaults to 0.4 for Lax-Friedrichs and 0.2 for Lagrangian-Eulerian.
    #[arg(long)]
    cfl: Option<f64>,
    /// Comma-separated record times; defaults to the final time.
    #[arg(long, value_delimiter = ',')]
    times: Vec<f64>,
    /// Output CSV; standard output when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    problem: ProblemId,
    #[arg(long, default_value_t = 40)]
    width: usize,
    #[arg(long, default_value_t = 10_000)]
    n_f: usize,
    #[arg(long, default_value_t = 100)]
    n_u: usize,
    #[arg(long, default_value_t = 0.0)]
    viscosity: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20_000)]
    iterations: usize,
    #[arg(long, default_value_t = 1e-3)]
    learning_rate: f64,
    /// Where to write the trained network.
    #[arg(long)]
    checkpoint: PathBuf,
    /// Print losses every this many iterations (0 disables).
    #[arg(long, default_value_t = 500)]
    log_every: usize,
}

#[derive(Args)]
struct OracleArgs {
    problem: ProblemId,
    #[arg(long, value_delimiter = ',', required = true)]
    times: Vec<f64>,
    #[arg(long, default_value_t = 0.01)]
    dx: f64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// A `t,x,u` CSV file or a network checkpoint.
    left: PathBuf,
    /// A `t,x,u` CSV file or a network checkpoint.
    right: PathBuf,
    /// Comma-separated times; defaults to the times of the CSV input.
    #[arg(long, value_delimiter = ',')]
    times: Vec<f64>,
    /// Domain for two checkpoints, compared at `--points` equispaced abscissae.
    #[arg(long)]
    problem: Option<ProblemId>,
    #[arg(long, default_value_t = 100)]
    points: usize,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Catalog problem name.
    name: ProblemId,
    #[arg(long, default_value = "quick")]
    profile: Profile,
    /// Configuration document to run instead of the catalog defaults.
    #[arg(long, conflicts_with = "profile")]
    config: Option<PathBuf>,
    /// Output directory; defaults to `runs/<name>`.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Print the resolved configuration and exit.
    #[arg(long)]
    dry_run: bool,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    n_f: Option<usize>,
    #[arg(long)]
    n_u: Option<usize>,
    #[arg(long)]
    viscosity: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    dx: Option<f64>,
}

fn write_csv_output(solution: &GridSolution, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => csvio::save_solution(solution, path),
        None => csvio::write_solution(solution, std::io::stdout().lock()),
    }
}

fn solve_fv(args: SolveFvArgs) -> Result<()> {
    let problem = args.problem.problem();
    let cfl_number = args.cfl.unwrap_or(match args.scheme {
        SchemeKind::LaxFriedrichs => 0.4,
        SchemeKind::LagrangianEulerian => 0.2,
    });
    let config = FvConfig {
        dx: args.dx,
        cfl_number,
        scheme: args.scheme,
        record_times: args.times,
    };
    let solution = fv::solve(&problem, &config)?;
    write_csv_output(&solution, args.out.as_deref())
}

fn train(args: TrainArgs) -> Result<()> {
    let config = TrainingConfig {
        problem: args.problem.problem(),
        n_f: args.n_f,
        n_u: args.n_u,
        width: args.width,
        viscosity: args.viscosity,
        seed: args.seed,
        optimizer: AdamConfig {
            learning_rate: args.learning_rate,
            iterations: args.iterations,
            ..AdamConfig::default()
        },
    };
    let log_every = args.log_every;
    let outcome = train_with_progress(&config, |i, losses| {
        if log_every > 0 && i % log_every == 0 {
            eprintln!("{i:>7}  L_f {:.4e}  L_u {:.4e}", losses.loss_f, losses.loss_u);
        }
    })?;
    outcome.params.save(&args.checkpoint)?;
    println!(
        "final L_f {:.6e} L_u {:.6e}; checkpoint written to {}",
        outcome.final_losses.loss_f,
        outcome.final_losses.loss_u,
        args.checkpoint.display()
    );
    Ok(())
}

fn oracle(args: OracleArgs) -> Result<()> {
    let problem = args.problem.problem();
    let exact = ExactSolution::for_problem(&problem)
        .ok_or_else(|| Error::InvalidConfig(format!("no exact solution for {}", args.problem)))?;
    if args.dx.is_nan() || args.dx <= 0.0 {
        return Err(Error::InvalidConfig(format!("dx must be positive, got {}", args.dx)));
    }
    let (x_centers, _) = fv::cell_centers(&problem, args.dx);
    let mut values = ndarray::Array2::zeros((args.times.len(), x_centers.len()));
    for (n, &t) in args.times.iter().enumerate() {
        let row = FieldSource::Exact(exact).sample(t, &x_centers)?;
        values.row_mut(n).assign(&ndarray::Array1::from(row));
    }
    let solution = GridSolution {
        x_centers,
        times: args.times,
        values,
    };
    write_csv_output(&solution, args.out.as_deref())
}

enum Input {
    Grid(GridSolution),
    Network(MlpParams),
}

impl Input {
    fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        if text.starts_with("hyperlab-mlp") {
            MlpParams::from_checkpoint(&text).map(Input::Network)
        } else {
            csvio::read_solution(text.as_bytes()).map(Input::Grid)
        }
    }

    fn source(&self) -> FieldSource<'_> {
        match self {
            Input::Grid(g) => FieldSource::Grid(g),
            Input::Network(p) => FieldSource::Network(p),
        }
    }

    fn grid(&self) -> Option<&GridSolution> {
        match self {
            Input::Grid(g) => Some(g),
            Input::Network(_) => None,
        }
    }
}

fn compare(args: CompareArgs) -> Result<()> {
    let left = Input::load(&args.left)?;
    let right = Input::load(&args.right)?;
    let xs = match (left.grid(), right.grid()) {
        (Some(a), Some(b)) => {
            if a.x_centers != b.x_centers {
                return Err(Error::GridMismatch(format!(
                    "{} has {} cells on [{}, {}], {} has {} cells on [{}, {}]",
                    args.left.display(),
                    a.x_centers.len(),
                    a.x_centers[0],
                    a.x_centers[a.x_centers.len() - 1],
                    args.right.display(),
                    b.x_centers.len(),
                    b.x_centers[0],
                    b.x_centers[b.x_centers.len() - 1],
                )));
            }
            a.x_centers.clone()
        }
        (Some(g), None) | (None, Some(g)) => g.x_centers.clone(),
        (None, None) => {
            let problem = args.problem.ok_or_else(|| {
                Error::InvalidConfig("comparing two checkpoints requires --problem".into())
            })?;
            let p = problem.problem();
            equispaced(p.x_min, p.x_max, args.points)
        }
    };
    let times = if args.times.is_empty() {
        left.grid()
            .or(right.grid())
            .map(|g| g.times.clone())
            .ok_or_else(|| Error::InvalidConfig("comparing two checkpoints requires --times".into()))?
    } else {
        args.times
    };
    let mut out = std::io::stdout().lock();
    writeln!(out, "t,error")?;
    for t in times {
        let e = error_vs_reference(&left.source().sample(t, &xs)?, &right.source().sample(t, &xs)?)?;
        writeln!(out, "{},{}", csvio::fmt_f64(t), csvio::fmt_f64(e))?;
    }
    Ok(())
}

fn experiment(args: ExperimentArgs) -> Result<()> {
    let base = match &args.config {
        Some(path) => {
            let config = ExperimentConfig::from_toml(&std::fs::read_to_string(path)?)?;
            if config.problem != args.name {
                return Err(Error::InvalidConfig(format!(
                    "{} describes {}, not {}",
                    path.display(),
                    config.problem,
                    args.name
                )));
            }
            config
        }
        None => ExperimentConfig::catalog(args.name, args.profile),
    };
    let config = base.with_overrides(&Overrides {
        width: args.width,
        n_f: args.n_f,
        n_u: args.n_u,
        viscosity: args.viscosity,
        seed: args.seed,
        iterations: args.iterations,
        learning_rate: args.learning_rate,
        dx: args.dx,
    });
    config.validate()?;
    if args.dry_run {
        print!("{}", config.to_toml());
        return Ok(());
    }
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from("runs").join(args.name.name()));
    let log_every = (config.training.iterations / 20).max(1);
    let report = run_experiment_with_progress(&config, Some(&out), |i, losses| {
        if i % log_every == 0 {
            eprintln!("{i:>7}  L_f {:.4e}  L_u {:.4e}", losses.loss_f, losses.loss_u);
        }
    })
    .map_err(|e| Error::InvalidConfig(format!("experiment {} failed: {e}", args.name)))?;
    let data = &report.data;
    println!("t,elf,eel");
    for ((t, elf), eel) in data.errors.times.iter().zip(&data.errors.elf).zip(&data.errors.eel) {
        println!("{t},{elf:.6e},{eel:.6e}");
    }
    println!("report written to {}", out.join("report.md").display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::SolveFv(a) => solve_fv(a),
        Command::Train(a) => train(a),
        Command::Oracle(a) => oracle(a),
        Command::Compare(a) => compare(a),
        Command::Experiment(a) => experiment(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
