//! `maxsat solve`: one instance, MaxSAT Evaluation output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context, Result};
use maxsat_core::wcnf::{brute_force_optimum, parse_wcnf, DEFAULT_ORACLE_LIMIT};
use maxsat_core::{solve, Algorithm, BoundStep, Cost, Error, Instance, SolveReport, SolveStatus, SolverConfig};

use crate::write_atomic;

pub const EXIT_OPTIMUM: u8 = 0;
pub const EXIT_UNSAT: u8 = 20;
pub const EXIT_RESOURCE: u8 = 0;
pub const EXIT_TIMEOUT: u8 = 124;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_FAILURE: u8 = 1;

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub algorithm: Algorithm,
    pub input: PathBuf,
    pub timeout: Option<Duration>,
    pub bound_step: BoundStep,
    pub seed: u64,
    pub conflict_limit: Option<u64>,
    pub trace: Option<PathBuf>,
    pub verify: bool,
}

impl SolveOptions {
    pub fn new(algorithm: Algorithm, input: impl Into<PathBuf>) -> Self {
        SolveOptions {
            algorithm,
            input: input.into(),
            timeout: None,
            bound_step: BoundStep::SubsetSum,
            seed: 0,
            conflict_limit: None,
            trace: None,
            verify: false,
        }
    }

    pub fn config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::new(self.algorithm)
            .with_bound_step(self.bound_step)
            .with_seed(self.seed);
        cfg.time_limit = self.timeout;
        cfg.conflict_limit = self.conflict_limit;
        cfg
    }
}

/// What `solve` prints and the process exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutput {
    pub text: String,
    pub exit: u8,
    pub report: SolveReport<u64>,
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_wcnf(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn run(opts: &SolveOptions) -> Result<SolveOutput> {
    let inst = read_instance(&opts.input)?;
    let report = solve(&inst, &opts.config())?;
    if let Some(path) = &opts.trace {
        write_atomic(path, report.trace_log().as_bytes())?;
    }
    let mut text = render(&report);
    let mut exit = exit_code(report.status);
    if opts.verify {
        let (line, ok) = verify(&inst, &report)?;
        writeln!(text, "c {line}").expect("string write");
        if !ok {
            exit = EXIT_FAILURE;
        }
    }
    Ok(SolveOutput { text, exit, report })
}

pub fn exit_code(status: SolveStatus) -> u8 {
    match status {
        SolveStatus::Optimum => EXIT_OPTIMUM,
        SolveStatus::HardUnsat => EXIT_UNSAT,
        SolveStatus::ResourceLimit => EXIT_RESOURCE,
        SolveStatus::Timeout => EXIT_TIMEOUT,
    }
}

/// Bad input (unreadable or malformed files, invalid flags) exits with 2.
pub fn error_exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<std::io::Error>().is_some() {
        return EXIT_USAGE;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::Parse(_) | Error::InvalidInstance(_) | Error::InvalidConfig(_) | Error::Unsupported(_)) => {
            EXIT_USAGE
        }
        _ => EXIT_FAILURE,
    }
}

/// `o` lines for every improvement, then the `s` line and, for an optimum,
/// the `v` line with the model as signed literals.
pub fn render(report: &SolveReport<u64>) -> String {
    let mut out = String::new();
    writeln!(out, "c algorithm {}", report.algorithm).expect("string write");
    for c in &report.improvements {
        writeln!(out, "o {c}").expect("string write");
    }
    match report.status {
        SolveStatus::Optimum => {
            out.push_str("s OPTIMUM FOUND\n");
            out.push('v');
            if let Some(m) = &report.model {
                for l in m.dimacs_lits() {
                    write!(out, " {l}").expect("string write");
                }
            }
            out.push('\n');
        }
        SolveStatus::HardUnsat => out.push_str("s UNSATISFIABLE\n"),
        SolveStatus::Timeout | SolveStatus::ResourceLimit => {
            if let Some(m) = &report.message {
                writeln!(out, "c {m}").expect("string write");
            }
            out.push_str("s UNKNOWN\n");
        }
    }
    out
}

/// Checks a claimed optimum (or hard-clause refutation) by enumeration.
pub fn verify(inst: &Instance, report: &SolveReport<u64>) -> Result<(String, bool)> {
    if !matches!(report.status, SolveStatus::Optimum | SolveStatus::HardUnsat) {
        return Ok(("verification skipped: no optimum claimed".into(), true));
    }
    if inst.num_vars() > DEFAULT_ORACLE_LIMIT {
        return Ok((
            format!(
                "verification skipped: {} variables exceed the enumeration limit {DEFAULT_ORACLE_LIMIT}",
                inst.num_vars()
            ),
            true,
        ));
    }
    if !report.certify(inst)? {
        return Ok((
            "verification FAILED: model does not match the reported cost".into(),
            false,
        ));
    }
    let (want, _) = brute_force_optimum(inst, DEFAULT_ORACLE_LIMIT)?;
    let ok = match want {
        Cost::Feasible(c) => report.cost == Some(c),
        Cost::Infeasible => report.status == SolveStatus::HardUnsat,
    };
    if ok {
        Ok(("verified against brute force".into(), true))
    } else {
        Ok((format!("verification FAILED: brute force gives {want}"), false))
    }
}
