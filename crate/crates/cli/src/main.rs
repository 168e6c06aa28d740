//! `betawl`: smallest-eigenvalue densities of β-Wishart-Laguerre ensembles
//! from the command line.

mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use betawl::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "betawl", version, about = "Smallest-eigenvalue statistics of beta-Wishart-Laguerre ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Ensemble {
    /// Matrix dimension n.
    pub n: usize,
    /// Laguerre exponent α (non-negative integer).
    pub alpha: String,
    /// β as `p/q`, a decimal, `pi`, `e` or a multiple such as `5pi`.
    pub beta: String,
}

#[derive(Args, Debug, Clone)]
pub struct PrecisionArg {
    /// `auto`, `exact`, or a float precision in bits. The default float
    /// precision can be set with BETAWL_FLOAT_BITS.
    #[arg(long, default_value = "auto")]
    pub precision: String,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Coeffs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form density of the smallest eigenvalue.
    Density {
        #[command(flatten)]
        ensemble: Ensemble,
        /// Use the fixed-trace ensemble.
        #[arg(long)]
        fixed_trace: bool,
        /// Evaluation grid `a:b:steps`, both ends included.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Output format; csv when a grid is given, json otherwise.
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[command(flatten)]
        precision: PrecisionArg,
    },
    /// Moments ⟨x^η⟩ of the smallest eigenvalue.
    #[command(allow_negative_numbers = true)]
    Moments {
        #[command(flatten)]
        ensemble: Ensemble,
        /// Moment orders; integers give exact values in exact mode.
        #[arg(required = true)]
        eta: Vec<String>,
        #[arg(long)]
        fixed_trace: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        precision: PrecisionArg,
    },
    /// Matrix-argument 1F1(−n+1; 2α/β+2; −x·1_α).
    #[command(allow_negative_numbers = true)]
    Hyp1f1 {
        #[command(flatten)]
        ensemble: Ensemble,
        #[arg(required = true)]
        x: Vec<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        precision: PrecisionArg,
    },
    /// Sample the bidiagonal model.
    Simulate {
        #[command(flatten)]
        ensemble: Ensemble,
        count: usize,
        seed: u64,
        #[arg(long, conflicts_with = "delay_time")]
        fixed_trace: bool,
        /// Largest delay time τ_H/λ_min; requires α = βn/2.
        #[arg(long, value_name = "TAU_H")]
        delay_time: Option<f64>,
        /// Kolmogorov-Smirnov distance to the closed-form CDF.
        #[arg(long)]
        ks: bool,
        /// Histogram with this many bins.
        #[arg(long, num_args = 0..=1, default_missing_value = "60", value_name = "BINS")]
        hist: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Soft-edge rescaling and large-deviation rate functions.
    Asymptotics {
        #[command(flatten)]
        ensemble: Ensemble,
        /// Grid of s values for −σ f(σs+ν).
        #[arg(long, allow_hyphen_values = true, value_name = "GRID")]
        tw_transform: Option<String>,
        /// Grid of z values for φ₋(z), φ₊(z).
        #[arg(long, allow_hyphen_values = true, value_name = "GRID")]
        large_dev: Option<String>,
        /// Grid of x values for the exact ln f against its large-deviation form.
        #[arg(long, allow_hyphen_values = true, value_name = "GRID")]
        ld_compare: Option<String>,
        /// Two-column `s,density` Tracy-Widom reference table.
        #[arg(long, value_name = "FILE")]
        tw_table: Option<std::path::PathBuf>,
        #[arg(long)]
        fixed_trace: bool,
        /// Output format; csv when exactly one grid is given.
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[command(flatten)]
        precision: PrecisionArg,
    },
    /// Built-in consistency checks.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

/// Everything a command writes to stdout, plus whether it wants exit code 3.
pub struct Outcome {
    pub text: String,
    pub consistent: bool,
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    match cli.command {
        Command::Density {
            ensemble,
            fixed_trace,
            grid,
            format,
            precision,
        } => commands::density(&ensemble, fixed_trace, grid.as_deref(), format, &precision.precision),
        Command::Moments {
            ensemble,
            eta,
            fixed_trace,
            format,
            precision,
        } => commands::moments(&ensemble, &eta, fixed_trace, format, &precision.precision),
        Command::Hyp1f1 {
            ensemble,
            x,
            format,
            precision,
        } => commands::hyp1f1(&ensemble, &x, format, &precision.precision),
        Command::Simulate {
            ensemble,
            count,
            seed,
            fixed_trace,
            delay_time,
            ks,
            hist,
            format,
        } => commands::simulate(&ensemble, count, seed, fixed_trace, delay_time, ks, hist, format),
        Command::Asymptotics {
            ensemble,
            tw_transform,
            large_dev,
            ld_compare,
            tw_table,
            fixed_trace,
            format,
            precision,
        } => commands::asymptotics(
            &ensemble,
            commands::AsymptoticGrids {
                tw_transform: tw_transform.as_deref(),
                large_dev: large_dev.as_deref(),
                ld_compare: ld_compare.as_deref(),
            },
            tw_table.as_deref(),
            fixed_trace,
            format,
            &precision.precision,
        ),
        Command::Verify { suite } => commands::verify(&suite),
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Consistency(_) | Error::Numerical(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(outcome.text.as_bytes()).and_then(|()| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            if outcome.consistent {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
