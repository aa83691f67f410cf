//! `w3w`: encode and decode word-triple addresses and regenerate the
//! confusability analyses as CSV/JSON files.

mod commands;
mod run_config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use w3w_core::Error;

#[derive(Debug, Parser)]
#[command(name = "w3w", version, about = "Word-triple geocoding and address confusability analyses")]
struct Cli {
    /// Run configuration (data paths, seed, codec). Defaults to $W3W_CONFIG,
    /// then the repository's config/w3w.toml.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads for the parallel loops (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Latitude/longitude to a word triple through grid box, linear index,
    /// congruence and cube-shell factorization.
    Encode {
        #[arg(allow_negative_numbers = true)]
        lat: f64,
        #[arg(allow_negative_numbers = true)]
        lon: f64,
        /// Also print the box, n, m and index triple.
        #[arg(short, long)]
        verbose: bool,
    },
    /// Word triple (`u.v.w` or three words) back to the box-center coordinates.
    Decode {
        #[arg(num_args = 1..=3, required = true)]
        words: Vec<String>,
        #[arg(short, long)]
        verbose: bool,
    },
    /// Per-word confusion-count distribution with its Poisson fit, and the
    /// confusion-count distributions of randomly sampled word triples.
    Global {
        #[command(flatten)]
        sampling: Sampling,
        /// Common-word frequency threshold.
        #[arg(long)]
        threshold: Option<u64>,
        #[command(flatten)]
        out: OutDir,
    },
    /// Exhaustive simulation of a row of neighbouring cells: confusable address
    /// pairs that coexist, their distance histogram and shared-word counts.
    Local {
        /// Cell row Y shared by every simulated cell.
        #[arg(long, default_value_t = 3396)]
        y: u32,
        /// First cell column X.
        #[arg(long, default_value_t = 4316)]
        x0: u32,
        /// Number of adjacent cells; cell i gets q = i * cell size.
        #[arg(long, default_value_t = 4)]
        cells: u32,
        /// Band whose constants and vocabulary the cells use.
        #[arg(long, default_value_t = 0)]
        band: u32,
        #[arg(long, value_enum, default_value_t = ModeArg::Pi)]
        mode: ModeArg,
        /// Distance histogram bin width in meters.
        #[arg(long, default_value_t = 100.0)]
        bin: f64,
        #[arg(long)]
        threshold: Option<u64>,
        #[command(flatten)]
        out: OutDir,
    },
    /// Birthday-problem probability that a disc of addresses holds at least
    /// one confusable pair, by closed-form approximation and exact product.
    Birthday {
        /// Mean confusions per address.
        #[arg(long)]
        c: f64,
        /// Total number of addresses.
        #[arg(long = "T")]
        total: f64,
        /// Disc radius in meters.
        #[arg(long)]
        r: f64,
        /// Box size in meters.
        #[arg(long, default_value_t = 3.0)]
        d: f64,
        #[command(flatten)]
        out: OutDir,
    },
    /// Fraction of sampled triples with more than three confusions as the
    /// common-word threshold varies.
    Sensitivity {
        /// Comma-separated frequency thresholds.
        #[arg(long, value_delimiter = ',', default_values_t = [3u64, 50, 150, 300, 600, 1200, 2400, 5000])]
        thresholds: Vec<u64>,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        out: OutDir,
    },
    /// Index shifts dn whose congruence shift a*dn mod M lands within a
    /// threshold of zero, i.e. boxes that receive nearly identical triples.
    DeltaScan {
        #[arg(long, default_value_t = 10_000_000)]
        max_dn: u64,
        #[arg(long, default_value_t = 10)]
        threshold: u64,
        #[arg(long, default_value_t = 0)]
        band: u32,
        /// Write the rows as CSV instead of printing them.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
struct Sampling {
    /// Sampled word triples (at least 10,000).
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
struct OutDir {
    /// Output directory; defaults to the configured one.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Pi,
    Sigma,
    Both,
}

/// Bad input is a usage error; everything else is a runtime failure.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Range { .. }
        | Error::UnknownWord { .. }
        | Error::AddressNotFound(_)
        | Error::Validation(_)
        | Error::Domain(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
