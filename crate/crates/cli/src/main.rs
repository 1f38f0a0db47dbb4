//! `ctmg`: solve, transform and cross-check time-bounded reachability models.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ctmg_core::solver::Objective;

#[derive(Parser)]
#[command(name = "ctmg", version, about = "Optimal time-bounded reachability for CTMDPs and CTMGs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file and list every violated side condition
    Validate { model: PathBuf },
    /// Optimal value and scheduler
    Solve {
        model: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
        /// Scheduler artifact path (default: the model path with extension `sched`)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Value curve path (default: the model path with extension `csv`)
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// Value of a given scheduler
    Evaluate {
        model: PathBuf,
        #[arg(long)]
        scheduler: PathBuf,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(2..))]
        steps: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// Apply a model transformation and print or write the result
    Transform {
        model: PathBuf,
        #[arg(long, value_enum)]
        op: TransformOp,
        /// Target exit rate for uniformise (default: the largest exit rate)
        #[arg(long, value_parser = positive)]
        rate: Option<f64>,
        /// Compound action cap for make-simple
        #[arg(long, default_value_t = 10_000)]
        cap: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimate of a scheduler's value
    Simulate {
        model: PathBuf,
        #[arg(long)]
        scheduler: PathBuf,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// Scheduler distance: probability that two schedulers ever disagree
    Distance {
        model: PathBuf,
        first: PathBuf,
        second: PathBuf,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(2..))]
        steps: u64,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// Independent reference values
    Oracle {
        model: PathBuf,
        #[arg(long, value_enum)]
        method: OracleMethod,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Max)]
        objective: ObjectiveArg,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(2..))]
        steps: u64,
        #[arg(long, default_value_t = 1e-8, value_parser = probability)]
        epsilon: f64,
        /// Single-interval scheduler artifact (uniformization)
        #[arg(long)]
        scheduler: Option<PathBuf>,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// Value curve with per-action gain columns `gain:<loc>:<action>`
    Curve {
        model: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        fmt: FormatArgs,
    },
}

#[derive(Args, Clone, Copy)]
struct SolveArgs {
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Max)]
    objective: ObjectiveArg,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(2..))]
    steps: u64,
    #[arg(long, default_value_t = 1e-9, value_parser = positive)]
    switch_tol: f64,
    #[arg(long, default_value_t = 1e-12, value_parser = positive)]
    tie_tol: f64,
}

#[derive(Args, Clone, Copy)]
struct FormatArgs {
    /// Decimal places: printed results default to 6, CSV files to full precision
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=17))]
    precision: Option<u8>,
}

impl FormatArgs {
    fn line(&self) -> u8 {
        self.precision.unwrap_or(6)
    }

    fn csv(&self) -> Option<usize> {
        self.precision.map(usize::from)
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum ObjectiveArg {
    Max,
    Min,
    Game,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Max => Objective::Max,
            ObjectiveArg::Min => Objective::Min,
            ObjectiveArg::Game => Objective::Game,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum TransformOp {
    EarlyToLate,
    LateToEarly,
    MakeSimple,
    Uniformise,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum OracleMethod {
    Grid,
    Uniformization,
    Enumerate,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

fn probability(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x <= 1.0 => Ok(x),
        _ => Err(format!("expected a number in (0, 1], got `{s}`")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
