//! `vbsim`: figure data, Monte-Carlo experiments and self-checks for the
//! variable-beam-splitter coherence test.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Parser)]
#[command(name = "vbsim", version, about = "Variable beam splitter: coherent vs. phase-mixed inputs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Click probability over (θ, |α|²) for both input kinds.
    Surface(SurfaceArgs),
    /// Click probability over θ for several relative phases χ.
    Curves(CurvesArgs),
    /// Monte-Carlo θ sweep with a classification verdict.
    Experiment(ExperimentArgs),
    /// Run the closed-form vs. brute-force check suite.
    Verify(VerifyArgs),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// key = value configuration file; flags take precedence.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output CSV (stdout when omitted).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct ThetaRange {
    /// First VBS angle, degrees.
    #[arg(long, value_name = "DEG", allow_hyphen_values = true)]
    theta_min: Option<f64>,
    /// Last VBS angle, degrees.
    #[arg(long, value_name = "DEG", allow_hyphen_values = true)]
    theta_max: Option<f64>,
    /// Number of angles, endpoints included.
    #[arg(long, value_name = "N")]
    theta_steps: Option<usize>,
}

#[derive(Args, Clone, Default)]
struct SurfaceArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    theta: ThetaRange,
    /// Calibration click probability p* at θ = 0; sets the top of the |α|² axis.
    #[arg(long, value_name = "P")]
    p_star: Option<f64>,
    /// Number of |α|² values from 0 to the maximum.
    #[arg(long, value_name = "N")]
    m_steps: Option<usize>,
    /// Largest |α|²; defaults to −ln(1 − p*).
    #[arg(long, value_name = "M")]
    mean_photons_max: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct CurvesArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    theta: ThetaRange,
    #[arg(long, value_name = "P")]
    p_star: Option<f64>,
    /// Relative phases, degrees, comma separated.
    #[arg(long, value_name = "DEG,...", allow_hyphen_values = true)]
    chi_list: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Source {
    Coherent,
    Poisson,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Drift {
    Fast,
    Frozen,
    Clock,
}

#[derive(Args, Clone, Default)]
struct ExperimentArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    theta: ThetaRange,
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Bernoulli trials per angle (required; there is no default).
    #[arg(long, value_name = "N")]
    trials: Option<u64>,
    #[arg(long, value_enum)]
    source: Option<Source>,
    #[arg(long, value_enum)]
    drift: Option<Drift>,
    /// p* used for the default |α|² = |β|² = −ln(1 − p*).
    #[arg(long, value_name = "P")]
    p_star: Option<f64>,
    /// |α|² of laser 1.
    #[arg(long, value_name = "M")]
    mean1: Option<f64>,
    /// |β|² of laser 2.
    #[arg(long, value_name = "M")]
    mean2: Option<f64>,
    /// Detector efficiency η.
    #[arg(long, value_name = "ETA")]
    eta: Option<f64>,
    /// Mean photon number of the thermal dark-count mode.
    #[arg(long, value_name = "N")]
    dark_mean: Option<f64>,
    /// Detection window, femtoseconds.
    #[arg(long, value_name = "FS")]
    window_fs: Option<f64>,
    /// Dead time after each window, nanoseconds.
    #[arg(long, value_name = "NS")]
    dead_ns: Option<f64>,
    #[arg(long, value_name = "NM")]
    lambda1_nm: Option<f64>,
    #[arg(long, value_name = "NM")]
    lambda2_nm: Option<f64>,
    /// Relative phase at t = 0, degrees.
    #[arg(long, value_name = "DEG", allow_hyphen_values = true)]
    chi0_deg: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct VerifyArgs {
    /// Also write the results as CSV.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Seed for the random parameter tuples.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Surface(a) => commands::surface(&a),
        Command::Curves(a) => commands::curves(&a),
        Command::Experiment(a) => commands::experiment(&a),
        Command::Verify(a) => commands::verify(&a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vbsim: {e}");
            e.exit_code()
        }
    }
}
