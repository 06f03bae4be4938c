use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use xsdep::io::cli::{run, KConvention, RunManifest};

/// Overrides the worker thread count; defaults to the available parallelism.
const THREADS_ENV: &str = "XSDEP_THREADS";

#[derive(Parser)]
#[command(name = "xsdep", version, about = "Cross-sectional independence tests for fixed-effects panels")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the full test battery on a long-format panel CSV.
    Test {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// include-intercept (k = k_x + 1) or regressors-only (k = k_x).
        #[arg(long, default_value = "include-intercept")]
        k_convention: KConvention,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate size or power over a grid of simulation designs.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Measure trace gaps between residual and error correlation matrices.
    TraceProbe {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }
    let manifest = match cli.command {
        Cmd::Test {
            input,
            alpha,
            k_convention,
            out,
        } => RunManifest::test(input, alpha, k_convention, out),
        Cmd::Simulate { config, seed, out } => RunManifest::simulate_from_file(config, seed, out),
        Cmd::TraceProbe { config, seed, out } => RunManifest::trace_probe_from_file(config, seed, out),
    };
    match manifest.and_then(|m| run(&m)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
