//! Command-line front end for the exciton-search library.

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use commands::{CommandError, EXIT_CONFIG, EXIT_OK};
use config::ScenarioConfig;
use exciton_search::oracle::Convention;
use exciton_search::units::Quantity;
use output::Format;
use std::path::PathBuf;

/// Built-in doped-naphthalene scenario, used when no --config is given.
const NAPHTHALENE_PRESET: &str = include_str!("../presets/naphthalene.toml");

#[derive(Parser)]
#[command(
    name = "exciton-search",
    version,
    about = "Exciton trapping as a quantum search: dispersion, trapping times, competing rates",
    after_help = "Without --config every command runs on the bundled doped-naphthalene preset."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario file (TOML); defaults to the bundled naphthalene preset
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output path; stdout when omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Table format
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Placement of hbar in the coherent-time expression: A (energy form,
    /// default) or B (rate-calibrated, 3 pi smaller)
    #[arg(long = "hbar-reading", global = true)]
    hbar_reading: Option<String>,

    /// Lorentzian width for the golden-rule integral, e.g. "0.5 cm^-1"
    #[arg(long, global = true)]
    broadening: Option<String>,

    /// Distance convention for the dense Hamiltonian
    #[arg(long, global = true, value_enum)]
    convention: Option<ConventionArg>,

    /// Reserved; all computations are deterministic
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    /// Couplings summed through both ring arcs plus the full loop
    Paper,
    /// Shortest-arc distances only
    MinimalImage,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Convention {
        match c {
            ConventionArg::Paper => Convention::PaperSum,
            ConventionArg::MinimalImage => Convention::MinimalImage,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Band sample: direct finite sum against the closed form, row per k
    Dispersion,
    /// Trapping-time breakdown and golden-rule rate for one scenario
    Search,
    /// Sweep N, mu, T, m or p over the [sweep] grid
    Sweep,
    /// All competing timescales and the feasibility bound
    Rates,
    /// Published-figure reproduction table for the naphthalene scenario
    Report,
    /// Brute-force property suite (exit 3 on any failure)
    Verify,
    /// Cycle-lattice search components T_0, T_p, T_N
    Lric,
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig, CommandError> {
    match &cli.config {
        Some(path) => Ok(ScenarioConfig::from_path(path)?),
        None => Ok(ScenarioConfig::from_str(NAPHTHALENE_PRESET)?),
    }
}

fn run(cli: &Cli) -> Result<i32, CommandError> {
    let cfg = load_config(cli)?;
    let format: Format = cli.format.into();
    let out = cli.out.as_deref();
    let reading = cfg.hbar_reading(cli.hbar_reading.as_deref())?;
    let broadening: Quantity = cfg.broadening(cli.broadening.as_deref())?;
    let convention: Convention = cli
        .convention
        .map(Into::into)
        .or_else(|| match cfg.run.convention.as_deref() {
            Some("paper") => Some(Convention::PaperSum),
            Some("minimal-image") => Some(Convention::MinimalImage),
            _ => None,
        })
        .unwrap_or(Convention::PaperSum);

    match cli.command {
        Command::Dispersion => commands::run_dispersion(&cfg, out, format),
        Command::Search => commands::run_search(&cfg, reading, broadening, out, format),
        Command::Sweep => commands::run_sweep(&cfg, reading, broadening, out, format),
        Command::Rates => commands::run_rates(&cfg, reading, out, format),
        Command::Report => commands::run_report(&cfg, reading, out, format),
        Command::Verify => commands::run_verify(&cfg, convention, out),
        Command::Lric => commands::run_lric(&cfg, reading, out, format),
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    debug_assert!(code == EXIT_OK || code == EXIT_CONFIG || code == commands::EXIT_CHECK);
    std::process::exit(code);
}
