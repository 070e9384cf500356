use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use maxsat_cli::bench::{self, BenchOptions, ComparisonTable, Timing};
use maxsat_cli::solve::{self, SolveOptions};
use maxsat_cli::{generate, write_atomic};
use maxsat_core::gen::{Family, GenSpec};
use maxsat_core::{Algorithm, BoundStep};

#[derive(Parser)]
#[command(
    name = "maxsat",
    version,
    about = "Weighted partial MaxSAT solvers and benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one WCNF instance.
    Solve {
        #[arg(long, short)]
        algorithm: Algorithm,
        #[arg(long, short)]
        input: PathBuf,
        /// Wall-clock limit in seconds.
        #[arg(long)]
        timeout: Option<f64>,
        #[arg(long, default_value = "subset-sum")]
        bound_step: BoundStep,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Conflict budget per SAT call.
        #[arg(long)]
        conflict_limit: Option<u64>,
        /// Write the iteration trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Check the answer by enumeration (at most 22 variables).
        #[arg(long)]
        verify: bool,
    },
    /// Run algorithms over every `.wcnf` file below a directory.
    Bench {
        #[arg(long)]
        dir: PathBuf,
        /// Comma-separated algorithm names, or `all`.
        #[arg(long, default_value = "all")]
        algorithms: String,
        /// Per-run wall-clock limit in seconds.
        #[arg(long, default_value_t = 10.0)]
        timeout: f64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "subset-sum")]
        bound_step: BoundStep,
        /// `wall` or `none`; `none` leaves times out so reruns are identical.
        #[arg(long, default_value = "wall")]
        timing: Timing,
        /// CSV output path.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Text table output path (also printed to stdout).
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        verify: bool,
    },
    /// Write random WPMax2SAT / WPMax3SAT instances.
    Generate {
        #[arg(long)]
        family: Family,
        #[arg(long, default_value_t = 10)]
        count: u64,
        #[arg(long)]
        vars: u32,
        #[arg(long)]
        clauses: usize,
        #[arg(long, default_value_t = 1)]
        min_weight: u64,
        #[arg(long, default_value_t = 20)]
        max_weight: u64,
        /// Share of clauses made hard, in [0, 1].
        #[arg(long, default_value_t = 0.0)]
        hard_fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn seconds(s: f64) -> Result<Duration> {
    if !(s.is_finite() && s > 0.0) {
        bail!("timeout must be a positive number of seconds, got {s}");
    }
    Ok(Duration::from_secs_f64(s))
}

fn algorithms(list: &str) -> Result<Vec<Algorithm>> {
    if list == "all" {
        return Ok(Algorithm::ALL.to_vec());
    }
    Ok(list.split(',').map(|s| s.trim().parse()).collect::<Result<_, _>>()?)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve {
            algorithm,
            input,
            timeout,
            bound_step,
            seed,
            conflict_limit,
            trace,
            verify,
        } => {
            let opts = SolveOptions {
                algorithm,
                input,
                timeout: timeout.map(seconds).transpose()?,
                bound_step,
                seed,
                conflict_limit,
                trace,
                verify,
            };
            let out = solve::run(&opts)?;
            print!("{}", out.text);
            Ok(out.exit)
        }
        Command::Bench {
            dir,
            algorithms: list,
            timeout,
            jobs,
            seed,
            bound_step,
            timing,
            csv,
            table,
            verify,
        } => {
            let opts = BenchOptions {
                dir,
                algorithms: algorithms(&list)?,
                timeout: seconds(timeout)?,
                jobs,
                seed,
                bound_step,
                timing,
                verify,
            };
            let runs = bench::run_bench(&opts)?;
            for p in bench::problems(&runs) {
                eprintln!("warning: {p}");
            }
            let t = ComparisonTable::from_runs(&runs, &opts.algorithms, timing);
            if let Some(path) = csv {
                write_atomic(&path, t.to_csv().as_bytes())?;
            }
            let text = t.to_text();
            if let Some(path) = table {
                write_atomic(&path, text.as_bytes())?;
            }
            print!("{text}");
            Ok(0)
        }
        Command::Generate {
            family,
            count,
            vars,
            clauses,
            min_weight,
            max_weight,
            hard_fraction,
            seed,
            out,
        } => {
            let spec = GenSpec {
                family,
                vars,
                clauses,
                min_weight,
                max_weight,
                hard_fraction,
                seed,
            };
            for p in generate::write_instances(&spec, count, &out)? {
                println!("{}", p.display());
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(solve::error_exit_code(&e))
        }
    }
}
