use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ehrelay_cli::{run_sweep, run_verify, schedule, CliError, InstanceConfig, Scheme, SweepConfig, VerifyOptions};
use ehrelay_core::oracle::append_failing_seeds;

#[derive(Parser)]
#[command(name = "ehrelay", version, about = "Offline power scheduling for energy-harvesting relay channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Throughput of each scheme over a grid of direct-link gains.
    Sweep { config: PathBuf },
    /// Compare the solvers with the grid oracle on random small instances.
    Verify {
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long = "max-n", default_value_t = 3)]
        max_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Append the seeds of failing instances to this file.
        #[arg(long)]
        failing_seeds: Option<PathBuf>,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Per-block powers and rates of one scheme.
    Schedule {
        config: PathBuf,
        #[arg(long, value_parser = parse_scheme)]
        scheme: Scheme,
    },
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Sweep { config } => {
            let cfg = SweepConfig::load(&config)?;
            run_sweep(&cfg)?.write_csv(sink(cfg.output.as_deref())?)?;
        }
        Command::Schedule { config, scheme } => {
            let cfg = InstanceConfig::load(&config)?;
            let report = schedule::solve(&cfg.instance()?, scheme)?;
            schedule::write_schedule(&report, sink(cfg.output.as_deref())?)?;
        }
        Command::Verify { instances, max_n, seed, failing_seeds, inject_fault } => {
            let opts = VerifyOptions { instances, max_n, seed, inject_fault, ..Default::default() };
            let summary = run_verify(&opts)?;
            print!("{summary}");
            if !summary.passed() {
                if let Some(path) = failing_seeds {
                    append_failing_seeds(&path, &summary.failing_seeds())?;
                }
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // Usage errors exit 1; 2 is reserved for verification failures.
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
