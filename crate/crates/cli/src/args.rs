use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Witness operator measurements: SIC construction, entanglement detection
/// statistics and tomography error.
#[derive(Debug, Parser)]
#[command(name = "wom", version, propagate_version = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Master seed, decimal or 0x-prefixed hex
    #[arg(long, global = true, default_value = "0xC0FFEE", value_parser = parse_seed)]
    pub seed: u64,

    /// Monte Carlo sample count
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub samples: u64,

    /// Concurrence histogram bins over [0, 1]
    #[arg(long, global = true, default_value_t = 20, value_parser = clap::value_parser!(u64).range(2..))]
    pub bins: u64,

    /// Worker threads [default: available parallelism]
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,

    /// Write output to this file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Output format [default: csv for `detect ratio`, json otherwise]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// SIC fiducial search and verification
    #[command(subcommand)]
    Sic(SicCommand),
    /// Witness operator measurement built from the d=4 SIC
    #[command(subcommand)]
    Wom(WomCommand),
    /// Entanglement detection experiments
    #[command(subcommand)]
    Detect(DetectCommand),
    /// Linear-inversion tomography error
    #[command(subcommand)]
    Tomo(TomoCommand),
    /// Sampled statistics against closed forms
    #[command(subcommand)]
    Check(CheckCommand),
    /// Two-qubit witness properties
    #[command(subcommand)]
    Witness(WitnessCommand),
}

#[derive(Debug, Subcommand)]
pub enum SicCommand {
    /// Find a SIC fiducial by frame-potential minimization and verify it
    Build {
        /// Hilbert-space dimension (2 to 6)
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(2..=6))]
        d: u64,
        /// Fiducial cache file; read if present, written after a search
        #[arg(long, value_name = "PATH")]
        cache: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum WomCommand {
    /// Construct the SIC-WOM and report its parameters and outcome spectra
    Build,
}

#[derive(Debug, Subcommand)]
pub enum DetectCommand {
    /// Detection ratio histogram against concurrence
    Ratio {
        /// Sampled two-qubit states
        #[arg(long, value_enum)]
        states: StatesArg,
        /// SIC-POM pure-state witnesses or the SIC-WOM
        #[arg(long, value_enum)]
        detector: DetectorArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatesArg {
    /// Haar-random pure states
    Pure,
    /// Hilbert-Schmidt random mixed states
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DetectorArg {
    Pom,
    Wom,
}

#[derive(Debug, Subcommand)]
pub enum TomoCommand {
    /// Mean squared Hilbert-Schmidt error of linear inversion
    Mse {
        /// Measurement
        #[arg(long, value_enum)]
        pom: PomArg,
        /// Input state
        #[arg(long, value_enum)]
        state: StateArg,
        /// Copies per run
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Independent runs
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PomArg {
    Sic,
    Wom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateArg {
    /// Maximally mixed state
    Mixed,
    /// Bell state
    Bell,
    /// Hilbert-Schmidt random state drawn from the seed
    Random,
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Detection ratios, Q^T2 moments, mean purities and the PT-witness ratio
    Formulas,
}

#[derive(Debug, Subcommand)]
pub enum WitnessCommand {
    /// Thresholds, concurrence and negativity for cos(a)|00> + sin(a)|11>
    Info {
        /// Angle a in (0, pi/4]
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
    },
}

pub fn parse_seed(s: &str) -> Result<u64, String> {
    let t = s.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16),
        None => t.replace('_', "").parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}
