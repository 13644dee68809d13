//! `rfj` - reproducible experiment runner for the random Fourier-Jacobi
//! laboratory. One experiment per invocation; CSV + summary artifacts.

mod config;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{parse_toml, validate};
use runner::RunFailure;

#[derive(Parser)]
#[command(
    name = "rfj",
    version,
    about = "Random Fourier-Jacobi series laboratory",
    after_help = "Exit codes: 0 success, 1 I/O error, 2 invalid config, \
                  3 numeric failure, 4 property failure.\n\
                  RFJ_THREADS limits the worker thread count."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config file.
    Run { config: PathBuf },
    /// Validate a config file and print the fully resolved form.
    Validate { config: PathBuf },
    /// List the catalog of test functions.
    Catalog,
    /// Print the version.
    Version,
}

fn main() -> ExitCode {
    // Die quietly on closed pipes (e.g. `rfj catalog | head`) like any
    // other Unix tool instead of panicking on EPIPE.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config } => with_thread_pool(|| run(&config)),
        Command::Validate { config } => validate_command(&config),
        Command::Catalog => {
            for line in runner::catalog_lines() {
                println!("{line}");
            }
            0
        }
        Command::Version => {
            println!("rfj {}", env!("CARGO_PKG_VERSION"));
            0
        }
    };
    ExitCode::from(code as u8)
}

/// Honors RFJ_THREADS for the replica-loop parallelism. Reports stay
/// byte-identical for any setting; this only bounds resource use.
fn with_thread_pool(f: impl FnOnce() -> i32 + Send) -> i32 {
    match std::env::var("RFJ_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .unwrap_or_else(|e| {
                eprintln!("error: could not build thread pool: {e}");
                1
            }),
        None => f(),
    }
}

fn load(path: &PathBuf) -> Result<config::ExperimentConfig, i32> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        1
    })?;
    parse_toml(&text).map_err(|e| {
        eprintln!("error: invalid config syntax in {}:\n{e}", path.display());
        2
    })
}

fn run(path: &PathBuf) -> i32 {
    let raw = match load(path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let resolved = match validate(&raw) {
        Ok(r) => r,
        Err(errors) => {
            eprintln!("error: invalid config:");
            for e in &errors {
                eprintln!("  - {e}");
            }
            return 2;
        }
    };
    match runner::run_to_dir(&resolved) {
        Ok(artifacts) => {
            println!("{}", artifacts.summary.trim_end());
            println!(
                "artifacts written to {}",
                resolved.output_path.as_deref().unwrap_or(".")
            );
            0
        }
        Err(RunFailure::Property) => {
            eprintln!(
                "property failure; see {}/summary.txt",
                resolved.output_path.as_deref().unwrap_or(".")
            );
            4
        }
        Err(failure) => {
            match &failure {
                RunFailure::Io(msg) => eprintln!("error: I/O: {msg}"),
                RunFailure::Config(errors) => {
                    eprintln!("error: invalid config:");
                    for e in errors {
                        eprintln!("  - {e}");
                    }
                }
                RunFailure::Numeric(e) => eprintln!("error: numeric failure: {e}"),
                RunFailure::Property => unreachable!(),
            }
            failure.exit_code()
        }
    }
}

fn validate_command(path: &PathBuf) -> i32 {
    let raw = match load(path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    match validate(&raw) {
        Ok(resolved) => {
            print!("{}", resolved.to_toml());
            0
        }
        Err(errors) => {
            eprintln!("invalid config:");
            for e in &errors {
                eprintln!("  - {e}");
            }
            2
        }
    }
}
