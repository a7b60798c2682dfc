//! Command-line front end: one subcommand per experiment, JSON configuration,
//! CSV/SVG artifacts, and a content-addressed matrix cache.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.
//!
//! Curve caching schema: curves serialize to a JSON document with the shape
//! parameters plus the panelization (panel windows, order, nodes with point /
//! tangent / normal / curvature / weight, cumulative lengths); boundary
//! matrices cache as raw little-endian complex128 arrays with a JSON sidecar
//! carrying {kind, lambda, b, curve_hash, n}.

pub mod cache;
pub mod config;
pub mod csvout;
pub mod run;
pub mod svg;

use clap::{Args, Parser, Subcommand};
use config::{Experiment, RunConfig};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "landelta",
    about = "Spectra of planar Landau Hamiltonians with delta-potentials on closed curves",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config and LANDELTA_OUT).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for matrix assembly.
    #[arg(long)]
    threads: Option<usize>,
    /// Disable the matrix cache.
    #[arg(long)]
    no_cache: bool,
    /// Seed for randomized property tests (selftest and greens sampling).
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Green-function cross-checks against the eigen-expansion.
    Greens(RunArgs),
    /// Weyl-function norms across spectral parameters.
    Weyl(RunArgs),
    /// Perturbed eigenvalue clusters near a Landau level.
    Spectrum(RunArgs),
    /// Toeplitz-type operator singular values and asymptotics.
    Toeplitz(RunArgs),
    /// Logarithmic capacity and equilibrium measure.
    Capacity(RunArgs),
    /// Norm-resolvent approximation by squeezed potentials.
    Approx(RunArgs),
    /// Run every module's invariant suite.
    Selftest(RunArgs),
}

impl Command {
    fn split(self) -> (Experiment, RunArgs) {
        match self {
            Command::Greens(a) => (Experiment::Greens, a),
            Command::Weyl(a) => (Experiment::Weyl, a),
            Command::Spectrum(a) => (Experiment::Spectrum, a),
            Command::Toeplitz(a) => (Experiment::Toeplitz, a),
            Command::Capacity(a) => (Experiment::Capacity, a),
            Command::Approx(a) => (Experiment::Approx, a),
            Command::Selftest(a) => (Experiment::Selftest, a),
        }
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    let (experiment, args) = cli.command.split();
    if let Some(n) = args.threads {
        // a second initialization in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cfg = match &args.config {
        Some(path) => match RunConfig::from_path(path) {
            Ok(cfg) => Some(cfg),
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        },
        None => None,
    };
    let cfg = match (cfg, &experiment) {
        (Some(cfg), _) => cfg,
        (None, Experiment::Selftest) => {
            // selftest runs without a config: a trivial default geometry
            serde_json::from_str(
                r#"{"geometry": {"kind": "circle", "radius": 1.0, "n_panels": 16},
                    "physics": {"b": 1.0}}"#,
            )
            .expect("built-in default config")
        }
        (None, _) => {
            eprintln!("error: --config is required for the {experiment} experiment");
            return 2;
        }
    };
    let out_dir = run::resolve_out_dir(args.out.clone(), Some(&cfg));
    match run::run(experiment, &cfg, &out_dir, !args.no_cache, args.seed) {
        Ok(()) => 0,
        Err(run::RunError::Config(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(e) => {
            eprintln!("numerical failure: {e}");
            3
        }
    }
}
