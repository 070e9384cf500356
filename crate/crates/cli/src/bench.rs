//! `maxsat bench`: every algorithm on every instance under a directory,
//! summarised per family as solved counts, percentages and times.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use maxsat_core::{solve, Algorithm, BoundStep, SolveStatus, SolverConfig};
use rayon::prelude::*;
use walkdir::WalkDir;

use crate::solve::{read_instance, verify};

pub const CSV_HEADER: &str = "solver,family,solved,total,percent,total_seconds";

/// Whether wall-clock times are reported. Without them the output depends
/// only on the instances and the configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Timing {
    #[default]
    Wall,
    None,
}

impl FromStr for Timing {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wall" => Ok(Timing::Wall),
            "none" => Ok(Timing::None),
            _ => bail!("unknown timing mode `{s}` (expected wall or none)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub dir: PathBuf,
    pub algorithms: Vec<Algorithm>,
    pub timeout: Duration,
    pub jobs: usize,
    pub seed: u64,
    pub bound_step: BoundStep,
    pub timing: Timing,
    /// Cross-check every claimed optimum by enumeration where feasible.
    pub verify: bool,
}

impl BenchOptions {
    pub fn new(dir: impl Into<PathBuf>, algorithms: Vec<Algorithm>) -> Self {
        BenchOptions {
            dir: dir.into(),
            algorithms,
            timeout: Duration::from_secs(10),
            jobs: 1,
            seed: 0,
            bound_step: BoundStep::SubsetSum,
            timing: Timing::Wall,
            verify: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Optimum,
    Timeout,
    HardUnsat,
    Error,
}

impl RunStatus {
    pub fn solved(self) -> bool {
        matches!(self, RunStatus::Optimum | RunStatus::HardUnsat)
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunStatus::Optimum => "optimum",
            RunStatus::Timeout => "timeout",
            RunStatus::HardUnsat => "unsat",
            RunStatus::Error => "error",
        })
    }
}

#[derive(Debug, Clone)]
pub struct BenchmarkRun {
    pub path: PathBuf,
    pub family: String,
    pub algorithm: Algorithm,
    pub limit: Duration,
    pub status: RunStatus,
    pub cost: Option<u64>,
    pub sat_calls: usize,
    pub conflicts: u64,
    pub elapsed: Duration,
    pub message: Option<String>,
}

/// `.wcnf` files below `dir`, with the name of their parent directory as
/// the family, sorted by path.
pub fn collect_instances(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    for entry in WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.with_context(|| format!("walking {}", dir.display()))?;
        let path = entry.path();
        if !entry.file_type().is_file() || path.extension().is_none_or(|e| e != "wcnf") {
            continue;
        }
        let family = path
            .parent()
            .and_then(|p| p.file_name())
            .map_or_else(|| "-".to_string(), |n| n.to_string_lossy().into_owned());
        out.push((family, path.to_path_buf()));
    }
    Ok(out)
}

pub fn run_one(path: &Path, family: &str, algorithm: Algorithm, opts: &BenchOptions) -> BenchmarkRun {
    let start = Instant::now();
    let mut run = BenchmarkRun {
        path: path.to_path_buf(),
        family: family.to_string(),
        algorithm,
        limit: opts.timeout,
        status: RunStatus::Error,
        cost: None,
        sat_calls: 0,
        conflicts: 0,
        elapsed: Duration::ZERO,
        message: None,
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| -> Result<_> {
        let inst = read_instance(path)?;
        let cfg = SolverConfig::new(algorithm)
            .with_bound_step(opts.bound_step)
            .with_seed(opts.seed)
            .with_time_limit(opts.timeout);
        let report = solve(&inst, &cfg)?;
        let checked = if opts.verify {
            Some(verify(&inst, &report)?)
        } else {
            None
        };
        Ok((report, checked))
    }));
    run.elapsed = start.elapsed();
    match outcome {
        Ok(Ok((report, checked))) => {
            run.status = match report.status {
                SolveStatus::Optimum => RunStatus::Optimum,
                SolveStatus::HardUnsat => RunStatus::HardUnsat,
                SolveStatus::Timeout | SolveStatus::ResourceLimit => RunStatus::Timeout,
            };
            run.cost = report.cost;
            run.sat_calls = report.stats.sat_calls;
            run.conflicts = report.stats.conflicts;
            run.message = report.message;
            if let Some((line, false)) = checked {
                run.status = RunStatus::Error;
                run.message = Some(line);
            }
        }
        Ok(Err(e)) => run.message = Some(format!("{e:#}")),
        Err(_) => run.message = Some("solver panicked".into()),
    }
    run
}

/// Runs every (instance, algorithm) pair on `opts.jobs` threads. The result
/// order is instance-major and independent of scheduling.
pub fn run_bench(opts: &BenchOptions) -> Result<Vec<BenchmarkRun>> {
    if opts.algorithms.is_empty() {
        bail!("no algorithms selected");
    }
    let instances = collect_instances(&opts.dir)?;
    let pairs: Vec<(&str, &Path, Algorithm)> = instances
        .iter()
        .flat_map(|(f, p)| opts.algorithms.iter().map(move |&a| (f.as_str(), p.as_path(), a)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.jobs.max(1)).build()?;
    Ok(pool.install(|| pairs.par_iter().map(|&(f, p, a)| run_one(p, f, a, opts)).collect()))
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Cell {
    pub solved: usize,
    pub total: usize,
    /// Time spent on the solved instances.
    pub seconds: f64,
}

impl Cell {
    /// Percentage solved, rounded to one decimal.
    pub fn percent(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        (1000.0 * self.solved as f64 / self.total as f64).round() / 10.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub solver: Algorithm,
    pub cells: Vec<Cell>,
    pub total: Cell,
}

/// Solved counts per solver and family, with a total column.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub families: Vec<String>,
    pub rows: Vec<Row>,
    pub timing: Timing,
}

impl ComparisonTable {
    pub fn from_runs(runs: &[BenchmarkRun], algorithms: &[Algorithm], timing: Timing) -> Self {
        let mut cells: BTreeMap<(Algorithm, &str), Cell> = BTreeMap::new();
        let mut families: Vec<String> = Vec::new();
        for r in runs {
            if !families.contains(&r.family) {
                families.push(r.family.clone());
            }
            let c = cells.entry((r.algorithm, r.family.as_str())).or_default();
            c.total += 1;
            if r.status.solved() {
                c.solved += 1;
                c.seconds += r.elapsed.as_secs_f64();
            }
        }
        families.sort();
        let rows = algorithms
            .iter()
            .map(|&a| {
                let cs: Vec<Cell> = families
                    .iter()
                    .map(|f| cells.get(&(a, f.as_str())).copied().unwrap_or_default())
                    .collect();
                let total = cs.iter().fold(Cell::default(), |t, c| Cell {
                    solved: t.solved + c.solved,
                    total: t.total + c.total,
                    seconds: t.seconds + c.seconds,
                });
                Row {
                    solver: a,
                    cells: cs,
                    total,
                }
            })
            .collect();
        ComparisonTable { families, rows, timing }
    }

    fn seconds(&self, c: &Cell) -> String {
        match self.timing {
            Timing::Wall => format!("{:.3}", c.seconds),
            Timing::None => "NA".into(),
        }
    }

    /// One line per solver and family plus a `total` line per solver.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let named = self.families.iter().map(String::as_str).zip(&row.cells);
            for (family, c) in named.chain(std::iter::once(("total", &row.total))) {
                writeln!(
                    out,
                    "{},{},{},{},{:.1},{}",
                    row.solver,
                    family,
                    c.solved,
                    c.total,
                    c.percent(),
                    self.seconds(c)
                )
                .expect("string write");
            }
        }
        out
    }

    /// Aligned tables: instances solved, percentages solved and, with wall
    /// timing, seconds spent on solved instances.
    pub fn to_text(&self) -> String {
        let mut header: Vec<String> = vec!["Solver".into()];
        header.extend(self.families.iter().map(|f| format!("{f} ({})", self.family_size(f))));
        let counts = self.grid(&header, |c| c.solved.to_string(), false);

        let mut header_total = header.clone();
        header_total.push("Total".into());
        let percents = self.grid(&header_total, |c| percent_label(c.percent()), true);

        let mut out = String::new();
        out.push_str("Number of instances solved\n");
        out.push_str(&counts);
        out.push_str("\nPercentages of instances solved\n");
        out.push_str(&percents);
        if self.timing == Timing::Wall {
            out.push_str("\nSeconds spent on solved instances\n");
            out.push_str(&self.grid(&header_total, |c| format!("{:.3}", c.seconds), true));
        }
        out
    }

    fn family_size(&self, family: &str) -> usize {
        let j = self.families.iter().position(|f| f == family).expect("known family");
        self.rows.first().map_or(0, |r| r.cells[j].total)
    }

    fn grid(&self, header: &[String], cell: impl Fn(&Cell) -> String, with_total: bool) -> String {
        let mut lines: Vec<Vec<String>> = vec![header.to_vec()];
        for row in &self.rows {
            let mut line = vec![row.solver.to_string()];
            line.extend(row.cells.iter().map(&cell));
            if with_total {
                line.push(cell(&row.total));
            }
            lines.push(line);
        }
        render_grid(&lines)
    }
}

/// `96.7%`, `100%`: one decimal, without a trailing `.0`.
pub fn percent_label(p: f64) -> String {
    let s = format!("{p:.1}");
    format!("{}%", s.strip_suffix(".0").unwrap_or(&s))
}

fn render_grid(lines: &[Vec<String>]) -> String {
    let cols = lines.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|j| {
            lines
                .iter()
                .filter_map(|l| l.get(j))
                .map(String::len)
                .max()
                .unwrap_or(0)
        })
        .collect();
    let rule: String = widths.iter().map(|w| "-".repeat(w + 2)).collect::<Vec<_>>().join("+");
    let mut out = String::new();
    for (i, line) in lines.iter().enumerate() {
        let cells: Vec<String> = line
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if j == 0 {
                    format!(" {c:<w$} ", w = widths[j])
                } else {
                    format!(" {c:>w$} ", w = widths[j])
                }
            })
            .collect();
        out.push_str(cells.join("|").trim_end());
        out.push('\n');
        if i == 0 {
            out.push_str(&rule);
            out.push('\n');
        }
    }
    out
}

/// Runs that did not finish normally, for warnings on stderr.
pub fn problems(runs: &[BenchmarkRun]) -> impl Iterator<Item = String> + '_ {
    runs.iter().filter(|r| r.status == RunStatus::Error).map(|r| {
        format!(
            "{} on {}: {}",
            r.algorithm,
            r.path.display(),
            r.message.as_deref().unwrap_or("error")
        )
    })
}
