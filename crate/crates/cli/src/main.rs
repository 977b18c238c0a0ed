//! `mcvd`: capture probabilities, channel curves, particle runs, BER curves,
//! threshold heatmaps and half- vs full-duplex comparisons from a config file.
//!
//! Exit status: 0 on success, 1 on a geometry or model error, 2 on a
//! configuration error.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::output::OutputDir;

#[derive(Debug, Parser)]
#[command(name = "mcvd", version, about = "Two-way molecular communication link toolkit")]
struct Cli {
    /// Sectioned key=value config file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory for CSV files and the manifest.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Seed for every random stream of the command.
    #[arg(long, global = true, value_name = "U64", default_value_t = 1)]
    seed: u64,

    /// Worker threads. Results do not depend on this value.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Asymptotic capture probabilities of both receivers.
    Capture,
    /// Hitting CDFs, expected arrival counts and channel taps.
    Channel,
    /// Brownian particle run against the analytic CDFs.
    Simulate,
    /// Theoretical and simulated BER over detection thresholds.
    Ber,
    /// BER heatmap over detection threshold and discarding time.
    Sweep,
    /// Half- vs full-duplex throughput comparison.
    Compare,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Capture => "capture",
            Command::Channel => "channel",
            Command::Simulate => "simulate",
            Command::Ber => "ber",
            Command::Sweep => "sweep",
            Command::Compare => "compare",
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let started = Instant::now();
    let path = cli.config.as_ref().ok_or(CliError::NoConfig)?;
    let cfg = Config::load(path)?;
    let threads = cli.threads.unwrap_or_else(rayon::current_num_threads).max(1);
    if cli.threads.is_some() {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let mut out = OutputDir::create(&cli.out, &cfg.hash())?;
    match cli.command {
        Command::Capture => commands::capture(&cfg, &mut out)?,
        Command::Channel => commands::channel(&cfg, &mut out)?,
        Command::Simulate => commands::simulate(&cfg, &mut out, cli.seed)?,
        Command::Ber => commands::ber(&cfg, &mut out, cli.seed)?,
        Command::Sweep => commands::sweep(&cfg, &mut out, cli.seed)?,
        Command::Compare => commands::compare(&cfg, &mut out)?,
    }
    let manifest = out.write_manifest(cli.command.name(), cli.seed, threads, started)?;
    for f in out.files() {
        println!("wrote {}", out.path(f).display());
    }
    println!("wrote {}", manifest.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
