//! `pgnl`: command-line front end for the polygonal-sum toolkit.

mod cache;
mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "pgnl", version, about = "Exact arithmetic for sums of generalized polygonal numbers")]
struct Cli {
    /// Output format; each command has a natural default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads for parallel commands (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Run every batch loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,

    /// Directory for the represented-value cache (overrides PGNL_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Smallest positive integer a sum does not represent.
    Truant {
        sum: String,
        #[arg(long, default_value_t = 10_000)]
        cap: u64,
    },
    /// Build an escalator tree and report its truant set.
    Tree(TreeArgs),
    /// Recompute the depth-two truant table and compare with the reference.
    Table2 {
        #[arg(long, default_value_t = 1000)]
        cap: u64,
        /// Perturb one computed cell before comparing (harness self-test).
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Local density factor of the shifted lattice at one prime.
    Density {
        sum: String,
        #[arg(short = 'n', long)]
        n: u64,
        #[arg(short = 'p', long)]
        p: u64,
        /// Include the per-level terms of the closed form.
        #[arg(long)]
        explain: bool,
        /// Also compute the density by counting congruence solutions.
        #[arg(long)]
        check: bool,
    },
    /// Rigorous interval for the Eisenstein coefficient and the cuspidal residual.
    Eisenstein {
        sum: String,
        #[arg(short = 'n', long)]
        n: u64,
        #[arg(long, default_value_t = 100)]
        cutoff: u64,
    },
    /// Depth-three or depth-four scan streamed as CSV.
    Scan(ScanArgs),
    /// Check that every confirmed ternary sum is universal up to a cap.
    VerifyCorpus {
        #[arg(long, default_value_t = 10_000)]
        cap: u64,
        /// Corpus file (one sum per line); defaults to the built-in list.
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct TreeArgs {
    #[arg(long)]
    lcm_bound: u64,
    #[arg(long, default_value_t = 3)]
    min_polygon: u64,
    #[arg(long, default_value_t = 1000)]
    cap: u64,
    #[arg(long)]
    depth_limit: Option<u32>,
    /// Write the full tree as nested JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = pgnl::escalator::DEFAULT_NODE_BUDGET)]
    budget: usize,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(3..=4))]
    depth: u32,
    /// Comma-separated polygon bounds, one per depth.
    #[arg(long, value_delimiter = ',', required = true)]
    bounds: Vec<u64>,
    #[arg(long, default_value_t = 3000)]
    cap: u64,
    /// Write rows here instead of stdout.
    #[arg(long, conflicts_with = "resume")]
    out: Option<PathBuf>,
    /// Continue a partially written output file in place.
    #[arg(long)]
    resume: Option<PathBuf>,
    #[arg(long, default_value_t = pgnl::escalator::DEFAULT_SCAN_BUDGET)]
    budget: u64,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(CliError::Usage("--workers must be positive".into()));
        }
        // read by the worker pool on first use, which has not happened yet
        std::env::set_var("RAYON_NUM_THREADS", w.to_string());
    }
    let exec = if cli.sequential { pgnl::Exec::Sequential } else { pgnl::Exec::default() };
    let cache = cache::ValueCache::from_env(cli.cache_dir.clone());
    let ctx = commands::Context { format: cli.format, exec, cache };
    match cli.command {
        Command::Truant { sum, cap } => commands::truant(&ctx, &sum, cap),
        Command::Tree(a) => commands::tree(&ctx, &a),
        Command::Table2 { cap, inject_fault } => commands::table2(&ctx, cap, inject_fault),
        Command::Density { sum, n, p, explain, check } => {
            commands::density(&ctx, &sum, n, p, explain, check)
        }
        Command::Eisenstein { sum, n, cutoff } => commands::eisenstein(&ctx, &sum, n, cutoff),
        Command::Scan(a) => commands::scan(&ctx, &a),
        Command::VerifyCorpus { cap, corpus } => commands::verify_corpus(&ctx, cap, corpus.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pgnl: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
