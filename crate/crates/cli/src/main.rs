//! `dscim` command-line front end.

mod commands;
mod config;
mod error;
mod io;

use clap::Parser;

use crate::error::EXIT_CONFIG;

/// Thread count for the worker pool; defaults to all cores.
const THREADS_ENV: &str = "DSCIM_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "dscim",
    version,
    about = "Stochastic compute-in-memory macro simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: commands::Command,
}

fn init_threads() -> Result<(), String> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .map_err(|_| format!("{THREADS_ENV}={value:?} is not a thread count"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("dscim: config error: {e}");
        std::process::exit(EXIT_CONFIG);
    }
    if let Err(e) = commands::run(cli.command) {
        eprintln!("dscim: {e}");
        std::process::exit(e.exit_code());
    }
}
