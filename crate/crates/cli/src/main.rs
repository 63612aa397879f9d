//! `sweepwidth` command-line front end.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "sweepwidth",
    version,
    about = "Effective sweep width of a helicopter visual search"
)]
pub struct Cli {
    #[command(flatten)]
    pub model: ModelArgs,

    #[command(subcommand)]
    pub command: Command,
}

/// Model settings shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Wavelength of light, nanometres.
    #[arg(long = "lambda-nm", global = true, default_value_t = 550.0)]
    pub lambda_nm: f64,

    /// Pupil diameter, millimetres.
    #[arg(long = "pupil-mm", global = true, default_value_t = 5.0)]
    pub pupil_mm: f64,

    /// Sea length in metres; also the number of one-metre columns.
    #[arg(long = "sea-length-m", global = true, default_value_t = 54_200)]
    pub sea_length_m: u32,

    /// Objects file (`name,size_m`); defaults to the built-in catalog.
    #[arg(long, global = true)]
    pub objects: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Rows (detection opportunities) per Monte Carlo experiment.
    #[arg(long, default_value_t = 600_000)]
    pub rows: u32,

    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    pub mode: ModeArg,
}

#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    #[arg(long)]
    pub object: String,

    /// Sensor altitude, metres.
    #[arg(long)]
    pub alt: u32,

    /// Visibility, kilometres.
    #[arg(long)]
    pub vis: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Mc,
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep width for every object, altitude and visibility.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Lateral range curve for one scenario.
    Lrc {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form sweep width for one scenario.
    Oracle {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Compare a results file against a reference W table.
    Compare {
        /// Results file written by `sweep`.
        #[arg(long)]
        model: PathBuf,
        /// Reference table (`object,altitude_m,visibility_km,w_km`).
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
}

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_DATA)
        }
    }
}
