use std::path::PathBuf;

use bscount_cli::{exit, run_file, Overrides};
use clap::Parser;

/// Birman–Schwinger bound-state counting experiments.
#[derive(Debug, Parser)]
#[command(name = "bscount", version)]
struct Args {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Worker threads (default: logical cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let args = Args::parse();
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("BSCOUNT_LOG", "error")).init();
    if let Some(jobs) = args.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("bscount: {e}");
            std::process::exit(exit::IO_ERROR);
        }
    }
    let overrides = Overrides {
        seed: args.seed,
        out: args.out,
    };
    match run_file(&args.config, &overrides) {
        Ok(w) => {
            println!("{}", w.csv.display());
            println!("{}", w.summary.display());
        }
        Err(e) => {
            eprintln!("bscount: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
