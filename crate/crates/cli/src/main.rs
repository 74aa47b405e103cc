//! `hitrun`: experiment runner for hit-and-run random walks.
//!
//! Exit codes: 0 ok, 2 invalid configuration, 3 invariant failure, 4 guard
//! exceeded. Thread count follows `RAYON_NUM_THREADS`.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Common;
use config::{Format, MeasureName};
use error::{CliError, INVARIANT_FAILURE};

#[derive(Debug, Parser)]
#[command(
    name = "hitrun",
    version,
    about = "Hit-and-run random walks on finite groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Raise the size guards (full group up to S_7, three cards on 21).
    #[arg(long, global = true)]
    heavy: bool,
    /// Seed for random test functions.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full-group spectrum, or the k-card spectrum with --k.
    Spectrum {
        #[arg(long, default_value = "hnr-ttr")]
        measure: MeasureName,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Distance curve from a start state.
    Mix {
        #[arg(long, default_value = "hnr-ttr")]
        measure: MeasureName,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 50)]
        tmax: usize,
        /// `id`, one-line notation such as `2,1,3`, or cyclic coordinates.
        #[arg(long, default_value = "id")]
        start: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Single-card closed forms against matrix powers, or a cutoff curve.
    SingleCard {
        #[arg(long)]
        n: usize,
        /// Comma-separated positions; all positions when absent.
        #[arg(long)]
        start: Option<String>,
        #[arg(long, default_value_t = 50)]
        tmax: usize,
        /// `bottom:i`, `top:i` or `middle:a`.
        #[arg(long)]
        regime: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// k-card chain spectrum with its eigenvalue histogram.
    Lumped {
        #[arg(long, default_value = "hnr-ttr")]
        measure: MeasureName,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Histogram CSV path (csv format only).
        #[arg(long)]
        hist: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Non-negativity certificate with the factorization error.
    Positivity {
        #[arg(long, default_value = "hnr-ttr")]
        measure: MeasureName,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Per-generator comparison weights against random-to-random.
    Compare {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// The d2 comparison inequality on a time grid.
    Dcomp {
        #[arg(long)]
        n: usize,
        /// `start:stop:step`.
        #[arg(long, default_value = "0:200:10")]
        grid: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Runs every invariant check.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
    },
}

impl CommonArgs {
    fn resolve(&self) -> Common {
        Common {
            out: self.out.clone(),
            format: self.format,
            heavy: self.heavy,
            seed: self.seed,
        }
    }
}

fn dispatch(command: Command) -> Result<commands::Report, CliError> {
    match command {
        Command::Spectrum {
            measure,
            n,
            k,
            common,
        } => commands::spectrum(&common.resolve(), measure, n, k),
        Command::Mix {
            measure,
            n,
            tmax,
            start,
            common,
        } => commands::mix(&common.resolve(), measure, n, tmax, &start),
        Command::SingleCard {
            n,
            start,
            tmax,
            regime,
            common,
        } => commands::single_card(
            &common.resolve(),
            n,
            start.as_deref(),
            tmax,
            regime.as_deref(),
        ),
        Command::Lumped {
            measure,
            n,
            k,
            hist,
            common,
        } => commands::lumped(&common.resolve(), measure, n, k, hist),
        Command::Positivity {
            measure,
            n,
            trials,
            common,
        } => commands::positivity(&common.resolve(), measure, n, trials),
        Command::Compare { n, common } => commands::compare(&common.resolve(), n),
        Command::Dcomp { n, grid, common } => commands::dcomp(&common.resolve(), n, &grid),
        Command::Verify { common } => commands::verify(&common.resolve()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = dispatch(cli.command).and_then(|report| {
        output::emit(&report.artifacts)?;
        Ok(report)
    });
    match result {
        Ok(report) if report.passed => ExitCode::SUCCESS,
        Ok(report) => {
            eprintln!("hitrun: invariant failure: {}", report.failure);
            ExitCode::from(INVARIANT_FAILURE)
        }
        Err(e) => {
            eprintln!("hitrun: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
