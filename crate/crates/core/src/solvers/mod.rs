//! The fourteen WPMaxSAT strategies behind one entry point, [`solve`].
//!
//! Every strategy first checks the hard clauses on their own so that
//! hard-contradictory inputs are reported uniformly as
//! [`SolveStatus::HardUnsat`].

mod binary;
mod cgbs;
mod lazy;
mod linear;
mod msu;
mod ror;
mod session;
mod trace;
mod wpm1;
mod wpm2;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::maxres::DEFAULT_PROOF_BUDGET;
use crate::wcnf::{cost_of, Assignment, Cost, WcnfInstance, WeightValue};

pub use trace::{CallOutcome, EntrySnapshot, IterationRecord, Note, SearchMode};

use session::Session;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    LinearUnsat,
    LinearSat,
    Bin,
    BinLin,
    BitBased,
    FuMalik,
    Wpm1,
    Wpm1Strat,
    Wpm2,
    Wmsu1Ror,
    Wmsu3,
    Wmsu4,
    Cgbs,
    Dcgbs,
}

impl Algorithm {
    pub const ALL: [Algorithm; 14] = [
        Algorithm::LinearUnsat,
        Algorithm::LinearSat,
        Algorithm::Bin,
        Algorithm::BinLin,
        Algorithm::BitBased,
        Algorithm::FuMalik,
        Algorithm::Wpm1,
        Algorithm::Wpm1Strat,
        Algorithm::Wpm2,
        Algorithm::Wmsu1Ror,
        Algorithm::Wmsu3,
        Algorithm::Wmsu4,
        Algorithm::Cgbs,
        Algorithm::Dcgbs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::LinearUnsat => "linear-unsat",
            Algorithm::LinearSat => "linear-sat",
            Algorithm::Bin => "bin",
            Algorithm::BinLin => "binlin",
            Algorithm::BitBased => "bitbased",
            Algorithm::FuMalik => "fumalik",
            Algorithm::Wpm1 => "wpm1",
            Algorithm::Wpm1Strat => "wpm1-strat",
            Algorithm::Wpm2 => "wpm2",
            Algorithm::Wmsu1Ror => "wmsu1-ror",
            Algorithm::Wmsu3 => "wmsu3",
            Algorithm::Wmsu4 => "wmsu4",
            Algorithm::Cgbs => "cgbs",
            Algorithm::Dcgbs => "dcgbs",
        }
    }

    /// `fumalik` only handles unit weights.
    pub fn accepts<W: WeightValue>(self, instance: &WcnfInstance<W>) -> bool {
        self != Algorithm::FuMalik || instance.is_unweighted()
    }

    /// Core-guided strategies relax soft clauses lazily.
    pub fn is_core_guided(self) -> bool {
        !matches!(
            self,
            Algorithm::LinearUnsat | Algorithm::LinearSat | Algorithm::Bin | Algorithm::BinLin | Algorithm::BitBased
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm `{s}`")))
    }
}

/// How lower bounds advance after an UNSAT answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundStep {
    /// Jump to the next sum reachable by a subset of the weights.
    #[default]
    SubsetSum,
    PlusOne,
}

impl FromStr for BoundStep {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subset-sum" => Ok(BoundStep::SubsetSum),
            "plus-one" => Ok(BoundStep::PlusOne),
            _ => Err(Error::InvalidConfig(format!("unknown bound step `{s}`"))),
        }
    }
}

impl fmt::Display for BoundStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundStep::SubsetSum => "subset-sum",
            BoundStep::PlusOne => "plus-one",
        })
    }
}

/// How stratified WPM1 lowers `w_max` after a satisfiable stratum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Diversity {
    /// Jump to the median of the smaller distinct weights when there are
    /// more of them than the square root of the clauses they cover;
    /// otherwise step to the next smaller weight.
    #[default]
    Median,
    /// Always step to the next smaller weight.
    NextWeight,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub bound_step: BoundStep,
    pub seed: u64,
    /// Conflict budget for each SAT call.
    pub conflict_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    /// Cap on the number of SAT calls.
    pub max_calls: Option<usize>,
    pub diversity: Diversity,
    /// DCGBS: give every entry the global falsified weight as its upper
    /// bound instead of the weight falsified inside the entry.
    pub dcgbs_global_ub: bool,
    /// Clause budget for the refutation search of WMSU1-ROR.
    pub proof_budget: usize,
}

/// Call cap applied to DCGBS in global-UB mode when none is configured:
/// that mode has no termination guarantee.
pub const DCGBS_GLOBAL_CALL_CAP: usize = 1_000;

impl SolverConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        SolverConfig {
            algorithm,
            bound_step: BoundStep::SubsetSum,
            seed: 0,
            conflict_limit: None,
            time_limit: None,
            max_calls: None,
            diversity: Diversity::Median,
            dcgbs_global_ub: false,
            proof_budget: DEFAULT_PROOF_BUDGET,
        }
    }

    pub fn with_bound_step(mut self, step: BoundStep) -> Self {
        self.bound_step = step;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn with_conflict_limit(mut self, limit: u64) -> Self {
        self.conflict_limit = Some(limit);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.conflict_limit == Some(0) {
            return Err(Error::InvalidConfig("conflict limit must be positive".into()));
        }
        if self.time_limit.is_some_and(|t| t.is_zero()) {
            return Err(Error::InvalidConfig("time limit must be positive".into()));
        }
        if self.max_calls == Some(0) {
            return Err(Error::InvalidConfig("call limit must be positive".into()));
        }
        if self.proof_budget == 0 {
            return Err(Error::InvalidConfig("proof budget must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimum,
    HardUnsat,
    Timeout,
    /// A conflict, call or encoding budget ran out.
    ResourceLimit,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimum => "OPTIMUM",
            SolveStatus::HardUnsat => "UNSATISFIABLE",
            SolveStatus::Timeout => "TIMEOUT",
            SolveStatus::ResourceLimit => "RESOURCE_LIMIT",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// SAT calls, including the initial hard-clause check.
    pub sat_calls: usize,
    pub conflicts: u64,
    pub decisions: u64,
    /// Clauses produced by pseudo-Boolean and exactly-one encodings.
    pub encoded_clauses: usize,
    pub encoded_vars: usize,
    pub blocking_vars: usize,
    pub rebuilds: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport<W> {
    pub algorithm: Algorithm,
    pub status: SolveStatus,
    /// Optimum cost, or the best cost found before a limit hit.
    pub cost: Option<W>,
    pub model: Option<Assignment>,
    /// Costs of successively better models, in discovery order.
    pub improvements: Vec<W>,
    pub trace: Vec<IterationRecord>,
    /// Blocking variables ever attached to each soft clause.
    pub blocking_per_soft: Vec<u32>,
    pub stats: SolveStats,
    /// Why a resource limit was hit.
    pub message: Option<String>,
}

impl<W: WeightValue> SolveReport<W> {
    /// Line-oriented rendering of the trace, one SAT call per line.
    pub fn trace_log(&self) -> String {
        let mut out = String::new();
        for r in &self.trace {
            out.push_str(self.algorithm.name());
            out.push(' ');
            out.push_str(&r.to_line());
            out.push('\n');
        }
        out
    }

    /// Lower bounds after each call, consecutive repeats collapsed.
    pub fn lb_sequence(&self) -> Vec<i128> {
        dedup(self.trace.iter().filter_map(|r| r.lb))
    }

    pub fn ub_sequence(&self) -> Vec<i128> {
        dedup(self.trace.iter().filter_map(|r| r.ub))
    }

    /// Query bounds of the SAT calls that had one.
    pub fn mids(&self) -> Vec<i128> {
        self.trace.iter().filter_map(|r| r.mid).collect()
    }

    /// Checks the optimality certificate against `instance`: the model
    /// satisfies the hard clauses and its cost equals the reported cost.
    pub fn certify(&self, instance: &WcnfInstance<W>) -> Result<bool> {
        match (self.status, &self.model, self.cost) {
            (SolveStatus::Optimum, Some(m), Some(c)) => Ok(cost_of(instance, m)? == Cost::Feasible(c)),
            (SolveStatus::HardUnsat, None, None) => Ok(true),
            (SolveStatus::Optimum | SolveStatus::HardUnsat, _, _) => Ok(false),
            _ => Ok(true),
        }
    }
}

fn dedup(it: impl Iterator<Item = i128>) -> Vec<i128> {
    let mut out: Vec<i128> = Vec::new();
    for v in it {
        if out.last() != Some(&v) {
            out.push(v);
        }
    }
    out
}

/// Runs the configured strategy on `instance`.
///
/// Limits never surface as errors: they end the search with a `Timeout` or
/// `ResourceLimit` status and the best model found so far. Errors are
/// reserved for invalid configurations and weight overflow.
pub fn solve<W: WeightValue>(instance: &WcnfInstance<W>, cfg: &SolverConfig) -> Result<SolveReport<W>> {
    cfg.validate()?;
    if !cfg.algorithm.accepts(instance) {
        return Err(Error::Unsupported(format!(
            "{} needs unit soft weights; use wpm1 for weighted instances",
            cfg.algorithm
        )));
    }
    let mut s = Session::new(instance, cfg);
    let outcome = match s.hard_check() {
        Ok(first) => match cfg.algorithm {
            Algorithm::LinearUnsat => linear::linear_unsat(&mut s),
            Algorithm::LinearSat => linear::linear_sat(&mut s, first),
            Algorithm::Bin => binary::bin(&mut s, first, false),
            Algorithm::BinLin => binary::bin(&mut s, first, true),
            Algorithm::BitBased => binary::bitbased(&mut s, first),
            Algorithm::FuMalik | Algorithm::Wpm1 => wpm1::wpm1(&mut s, false),
            Algorithm::Wpm1Strat => wpm1::wpm1(&mut s, true),
            Algorithm::Wpm2 => wpm2::wpm2(&mut s),
            Algorithm::Wmsu1Ror => ror::wmsu1_ror(&mut s),
            Algorithm::Wmsu3 => msu::wmsu3(&mut s),
            Algorithm::Wmsu4 => msu::wmsu4(&mut s, first),
            Algorithm::Cgbs => cgbs::cgbs(&mut s, first),
            Algorithm::Dcgbs => cgbs::dcgbs(&mut s, first),
        },
        Err(h) => Err(h),
    };
    s.into_report(outcome)
}
