//! Command-line front end.
//!
//! Exit status: 0 success, 1 usage error, 2 numerical failure, 3 a failed
//! verification criterion.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use exprgg::commands::{self, parse_count, parse_grid, HittingOptions, Model};
use exprgg::output::{Artifact, Format, Sink};
use exprgg::verify::DEFAULT_SEED;
use exprgg::{Error, RateSpec};

#[derive(Parser)]
#[command(
    name = "exprgg",
    version,
    about = "Exponential random geometric graph process"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Number of vertices.
    #[arg(long, global = true, default_value_t = 10)]
    n: usize,
    /// Probability that a gap keeps its previous value in the update.
    #[arg(long, global = true, default_value_t = 0.5)]
    p: f64,
    /// Connection cutoff.
    #[arg(long, global = true, default_value_t = 1.0)]
    r: f64,
    /// Gap rates: a scalar, or "count:rate,..." with `*` for the rest.
    #[arg(long, global = true, default_value = "1")]
    lambda: RateSpec,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads for Monte Carlo runs (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory; one file per table. Stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Two-state connectivity chain.
    Chain {
        /// Also tabulate the stationary connection probability over --n-grid.
        #[arg(long)]
        limit: bool,
        #[arg(long, default_value = "2,5,10,20,50", value_parser = grid)]
        n_grid: Grid,
        /// Compare with a simulated trajectory of this many steps.
        #[arg(long, value_parser = count)]
        mc: Option<usize>,
    },
    /// Component-count chain and its stationary law.
    Components,
    /// Survival law of the time to disconnection.
    Hitting {
        #[arg(long, default_value_t = 12)]
        k_max: usize,
        #[arg(long, default_value_t = 1e-10)]
        quad_tol: f64,
        /// Add the run-decomposition column.
        #[arg(long)]
        oracle: bool,
        /// Add Monte Carlo columns from this many replications.
        #[arg(long, value_parser = count)]
        mc: Option<usize>,
    },
    /// Fixed-time laws.
    Snapshot {
        #[arg(value_enum)]
        recipe: Recipe,
        /// Sizes: "2,5,10", "1e2,1e3" or "12..60".
        #[arg(long, value_parser = grid)]
        n_grid: Option<Grid>,
        /// Component counts for the figure2 recipe.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        k: Vec<usize>,
        /// Vertex for the degree recipe (1-based).
        #[arg(long)]
        i: Option<usize>,
        /// Replications per size for the extremes recipe.
        #[arg(long, default_value_t = 50)]
        reps: usize,
        /// Monte Carlo samples for summary and degree.
        #[arg(long, value_parser = count)]
        mc: Option<usize>,
    },
    /// One trajectory, step by step.
    Simulate {
        #[arg(long, default_value_t = 1000, value_parser = count)]
        steps: usize,
    },
    /// Run the acceptance criteria.
    Verify {
        /// Only these criteria, e.g. "1,2,9".
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Recipe {
    Summary,
    Figure2,
    Degree,
    Extremes,
}

#[derive(Clone)]
struct Grid(Vec<usize>);

fn grid(s: &str) -> Result<Grid, String> {
    parse_grid(s).map(Grid).map_err(|e| e.to_string())
}

fn count(s: &str) -> Result<usize, String> {
    parse_count(s).map_err(|e| e.to_string())
}

enum Failure {
    Lib(Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let c = &cli.common;
    if let Some(workers) = c.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| Error::InvalidParams(e.to_string()))?;
    }
    let model = Model {
        n: c.n,
        p: c.p,
        r: c.r,
        lambda: c.lambda.clone(),
    };
    let sink = Sink {
        format: match c.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        },
        dir: c.out.clone(),
    };
    let artifacts = match cli.command {
        Command::Chain { limit, n_grid, mc } => {
            commands::chain(&model, limit.then_some(&n_grid.0[..]), mc, c.seed)?
        }
        Command::Components => commands::components(&model)?,
        Command::Hitting {
            k_max,
            quad_tol,
            oracle,
            mc,
        } => commands::hitting(
            &model,
            &HittingOptions {
                k_max,
                quad_tol,
                oracle,
                mc,
                seed: c.seed,
            },
        )?,
        Command::Snapshot {
            recipe,
            n_grid,
            k,
            i,
            reps,
            mc,
        } => match recipe {
            Recipe::Summary => commands::snapshot_summary(&model, mc, c.seed)?,
            Recipe::Figure2 => {
                let grid = n_grid.map_or_else(|| (12..=60).collect(), |g| g.0);
                commands::snapshot_figure2(c.r, &grid, &k)?
            }
            Recipe::Degree => {
                let i = i.ok_or_else(|| Error::InvalidParams("degree needs --i".into()))?;
                commands::snapshot_degree(&model, i, mc, c.seed)?
            }
            Recipe::Extremes => commands::snapshot_extremes(
                &model,
                n_grid.as_ref().map(|g| &g.0[..]),
                reps,
                c.seed,
            )?,
        },
        Command::Simulate { steps } => commands::simulate(&model, steps, c.seed)?,
        Command::Verify { only } => {
            let report = commands::verify(c.seed, &only)?;
            for outcome in &report.criteria {
                eprintln!("{}", outcome.summary_line());
            }
            sink.write_all(&[Artifact::document("verify", &report)?])?;
            return if report.passed {
                Ok(())
            } else {
                Err(Failure::Verification)
            };
        }
    };
    for path in sink.write_all(&artifacts)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(3),
        Err(Failure::Lib(Error::Output(msg))) if msg.is_empty() => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}
