//! Shared plumbing: one SAT engine plus the encoding context, clause groups
//! that can be retired, model bookkeeping and the trace.

use std::time::Instant;

use crate::bounds::WeightSet;
use crate::error::Error;
use crate::pb::{encode_exactly_one, encode_pb_leq, EncodingContext, PbConstraint, Relation};
use crate::sat::{SatOutcome, SatSolver, SatStats};
use crate::wcnf::{cost_of, Assignment, Clause, Cost, Lit, Var, WcnfInstance, WeightValue};

use super::trace::{CallOutcome, IterationRecord, Note};
use super::{BoundStep, SolveReport, SolveStats, SolveStatus, SolverConfig, DCGBS_GLOBAL_CALL_CAP};

/// Why a strategy stopped without an optimum.
#[derive(Debug)]
pub(crate) enum Halt {
    HardUnsat,
    Timeout,
    Resource(String),
    Fail(Error),
}

impl From<Error> for Halt {
    fn from(e: Error) -> Self {
        match e {
            Error::ResourceLimit(m) => Halt::Resource(m),
            e => Halt::Fail(e),
        }
    }
}

pub(crate) struct Done<W> {
    pub cost: W,
    pub model: Assignment,
}

pub(crate) type Flow<W> = Result<Done<W>, Halt>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct GroupId(usize);

/// Retired clauses tolerated before the engine is rebuilt from the live ones.
const GARBAGE_THRESHOLD: usize = 20_000;

pub(crate) struct Session<'a, W> {
    pub inst: &'a WcnfInstance<W>,
    pub cfg: &'a SolverConfig,
    sat: SatSolver,
    ctx: EncodingContext,
    base: Vec<Clause>,
    groups: Vec<Option<Vec<Clause>>>,
    live: usize,
    garbage: usize,
    deadline: Option<Instant>,
    max_calls: Option<usize>,
    calls: usize,
    prior: SatStats,
    stats: SolveStats,
    pub trace: Vec<IterationRecord>,
    improvements: Vec<W>,
    best: Option<(W, Assignment)>,
    blocking: Vec<u32>,
}

impl<'a, W: WeightValue> Session<'a, W> {
    pub fn new(inst: &'a WcnfInstance<W>, cfg: &'a SolverConfig) -> Self {
        let deadline = cfg.time_limit.map(|t| Instant::now() + t);
        let max_calls = if cfg.dcgbs_global_ub && cfg.algorithm == super::Algorithm::Dcgbs {
            Some(cfg.max_calls.unwrap_or(DCGBS_GLOBAL_CALL_CAP))
        } else {
            cfg.max_calls
        };
        let mut s = Session {
            inst,
            cfg,
            sat: SatSolver::with_seed(cfg.seed),
            ctx: EncodingContext::new(inst.num_vars() + 1),
            base: inst.hard().to_vec(),
            groups: Vec::new(),
            live: 0,
            garbage: 0,
            deadline,
            max_calls,
            calls: 0,
            prior: SatStats::default(),
            stats: SolveStats::default(),
            trace: Vec::new(),
            improvements: Vec::new(),
            best: None,
            blocking: vec![0; inst.soft().len()],
        };
        s.sat = s.fresh_engine();
        for c in inst.hard() {
            s.sat.add_clause_ref(c);
        }
        s
    }

    fn fresh_engine(&self) -> SatSolver {
        let mut sat = SatSolver::with_seed(self.cfg.seed);
        sat.set_conflict_limit(self.cfg.conflict_limit);
        sat.set_deadline(self.deadline);
        sat.reserve_vars(self.ctx.max_var());
        sat
    }

    pub fn num_vars(&self) -> u32 {
        self.inst.num_vars()
    }

    pub fn weight(&self, i: usize) -> W {
        self.inst.soft()[i].weight
    }

    pub fn fresh(&mut self) -> Var {
        let v = self.ctx.fresh();
        self.sat.reserve_vars(v.get());
        v
    }

    /// Fresh blocking variable attributed to soft clause `origin`.
    pub fn blocking_var(&mut self, origin: Option<usize>) -> Var {
        match origin {
            Some(i) => self.count_blocking(i),
            None => self.stats.blocking_vars += 1,
        }
        self.fresh()
    }

    /// Counts a blocking variable attached to soft clause `i`.
    pub fn count_blocking(&mut self, i: usize) {
        self.stats.blocking_vars += 1;
        self.blocking[i] += 1;
    }

    /// Removes the hard clauses from the engine so a strategy can re-add
    /// them under assumption guards.
    pub fn drop_base(&mut self) {
        self.base.clear();
        self.rebuild();
        self.stats.rebuilds -= 1;
    }

    pub fn add_hard(&mut self, c: Clause) {
        self.sat.add_clause_ref(&c);
        self.base.push(c);
    }

    pub fn add_group(&mut self, clauses: Vec<Clause>) -> GroupId {
        for c in &clauses {
            self.sat.add_clause_ref(c);
        }
        self.live += clauses.len();
        self.groups.push(Some(clauses));
        GroupId(self.groups.len() - 1)
    }

    /// Drops a group; its clauses stay in the engine until the next rebuild
    /// but must no longer matter (their root is no longer assumed).
    pub fn retire(&mut self, g: GroupId) {
        if let Some(cs) = self.groups[g.0].take() {
            self.live -= cs.len();
            self.garbage += cs.len();
        }
        if self.garbage > GARBAGE_THRESHOLD && self.garbage > self.live + self.base.len() {
            self.rebuild();
        }
    }

    fn rebuild(&mut self) {
        let old = self.sat.stats();
        self.prior.conflicts += old.conflicts;
        self.prior.decisions += old.decisions;
        self.sat = self.fresh_engine();
        for c in self.base.iter().chain(self.groups.iter().flatten().flatten()) {
            self.sat.add_clause_ref(c);
        }
        self.garbage = 0;
        self.stats.rebuilds += 1;
    }

    /// Encodes `Σ terms ≤ bound` as a retirable group; assuming the returned
    /// root enforces it.
    pub fn pb_leq(&mut self, terms: Vec<(W, Lit)>, bound: i128) -> Result<(Lit, GroupId), Halt> {
        self.check_deadline()?;
        let c = PbConstraint::leq(terms, bound)?;
        let enc = encode_pb_leq(&c, &mut self.ctx).map_err(|e| self.encoding_halt(e))?;
        self.sat.reserve_vars(self.ctx.max_var());
        self.stats.encoded_clauses += enc.clauses.len();
        self.stats.encoded_vars += enc.profile.variables;
        let g = self.add_group(enc.clauses);
        Ok((enc.root, g))
    }

    /// Adds `Σ terms rel bound` permanently.
    pub fn pb_hard(&mut self, terms: Vec<(W, Lit)>, rel: Relation, bound: i128) -> Result<(), Halt> {
        self.check_deadline()?;
        for c in PbConstraint::new(terms, rel, bound)? {
            let enc = encode_pb_leq(&c, &mut self.ctx).map_err(|e| self.encoding_halt(e))?;
            self.sat.reserve_vars(self.ctx.max_var());
            self.stats.encoded_clauses += enc.clauses.len();
            self.stats.encoded_vars += enc.profile.variables;
            for cl in enc.clauses {
                self.add_hard(cl);
            }
            self.add_hard(Clause::new([enc.root]));
        }
        Ok(())
    }

    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn check_deadline(&self) -> Result<(), Halt> {
        if self.expired() {
            return Err(Halt::Timeout);
        }
        Ok(())
    }

    // A large encoding can outlive the deadline before it hits its size cap.
    fn encoding_halt(&self, e: Error) -> Halt {
        match Halt::from(e) {
            Halt::Resource(_) if self.expired() => Halt::Timeout,
            h => h,
        }
    }

    pub fn exactly_one(&mut self, bs: &[Lit]) -> Result<(), Halt> {
        let cs = encode_exactly_one(bs)?;
        self.stats.encoded_clauses += cs.len();
        for c in cs {
            self.add_hard(c);
        }
        Ok(())
    }

    /// Adds `(C_i ∨ b_i)` for every non-tautological soft clause.
    pub fn relax_all(&mut self) -> Vec<Option<Lit>> {
        (0..self.inst.soft().len())
            .map(|i| {
                let c = &self.inst.soft()[i].clause;
                if c.is_tautology() {
                    return None;
                }
                let c = c.clone();
                let b = self.blocking_var(Some(i)).pos();
                self.add_hard(c.with_lit(b));
                Some(b)
            })
            .collect()
    }

    /// `(w_i, b_i)` for the given soft indices that have a blocking literal.
    pub fn terms(&self, bs: &[Option<Lit>], idx: impl IntoIterator<Item = usize>) -> Vec<(W, Lit)> {
        idx.into_iter()
            .filter_map(|i| bs[i].map(|b| (self.weight(i), b)))
            .collect()
    }

    pub fn weight_set(&self, idx: impl IntoIterator<Item = usize>) -> Result<WeightSet, Halt> {
        Ok(WeightSet::new(idx.into_iter().map(|i| self.weight(i)))?)
    }

    /// The configured bound step: smallest admissible value above `k`.
    pub fn update_bound(&self, ws: &WeightSet, k: i128) -> i128 {
        match self.cfg.bound_step {
            BoundStep::SubsetSum => ws.next_bound(k),
            BoundStep::PlusOne => {
                if k >= ws.sum() {
                    ws.sum()
                } else {
                    k + 1
                }
            }
        }
    }

    pub fn solve(&mut self, assumptions: &[Lit]) -> Result<SatOutcome, Halt> {
        if self.max_calls.is_some_and(|m| self.calls >= m) {
            return Err(Halt::Resource(format!("SAT call limit {} reached", self.calls)));
        }
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(Halt::Timeout);
        }
        self.calls += 1;
        let out = self.sat.solve_with_assumptions(assumptions);
        match out {
            SatOutcome::Unknown => {
                if self.deadline.is_some_and(|d| Instant::now() >= d) {
                    Err(Halt::Timeout)
                } else {
                    Err(Halt::Resource("conflict limit reached".into()))
                }
            }
            o => Ok(o),
        }
    }

    /// Index of the most recent call, for trace records.
    pub fn call(&self) -> usize {
        self.calls - 1
    }

    pub fn record(&mut self, outcome: CallOutcome) -> &mut IterationRecord {
        self.trace.push(IterationRecord::new(self.call(), outcome));
        self.trace.last_mut().expect("just pushed")
    }

    /// Satisfiability of the hard clauses alone; returns a model of them.
    pub fn hard_check(&mut self) -> Result<Assignment, Halt> {
        let out = self.solve(&[])?;
        let rec = IterationRecord {
            notes: vec![Note::HardCheck],
            ..IterationRecord::new(
                0,
                if out.is_sat() {
                    CallOutcome::Sat
                } else {
                    CallOutcome::Unsat
                },
            )
        };
        self.trace.push(rec);
        match out {
            SatOutcome::Sat(m) => Ok(m.truncated(self.num_vars())),
            _ => Err(Halt::HardUnsat),
        }
    }

    /// Sets the bounds the search starts from on the hard-check record.
    pub fn set_initial(&mut self, lb: Option<i128>, ub: Option<i128>) {
        if let Some(r) = self.trace.first_mut() {
            r.lb = lb;
            r.ub = ub;
        }
    }

    /// Cost of `model` restricted to the instance variables.
    pub fn cost(&self, model: &Assignment) -> Result<W, Halt> {
        match cost_of(self.inst, &model.truncated(self.num_vars()))? {
            Cost::Feasible(c) => Ok(c),
            Cost::Infeasible => Err(Halt::Fail(Error::InvalidInstance(
                "SAT model falsifies a hard clause".into(),
            ))),
        }
    }

    /// Records a model found during the search and returns its cost.
    pub fn observe(&mut self, model: &Assignment) -> Result<W, Halt> {
        let c = self.cost(model)?;
        if self.best.as_ref().is_none_or(|(b, _)| c < *b) {
            self.improvements.push(c);
            self.best = Some((c, model.truncated(self.num_vars())));
        }
        Ok(c)
    }

    pub fn done(&mut self, cost: W, model: &Assignment) -> Flow<W> {
        Ok(Done {
            cost,
            model: model.truncated(self.num_vars()),
        })
    }

    pub fn into_report(self, outcome: Flow<W>) -> crate::error::Result<SolveReport<W>> {
        let sat = self.sat.stats();
        let mut stats = self.stats;
        stats.sat_calls = self.calls;
        stats.conflicts = self.prior.conflicts + sat.conflicts;
        stats.decisions = self.prior.decisions + sat.decisions;
        let mut report = SolveReport {
            algorithm: self.cfg.algorithm,
            status: SolveStatus::Optimum,
            cost: None,
            model: None,
            improvements: self.improvements,
            trace: self.trace,
            blocking_per_soft: self.blocking,
            stats,
            message: None,
        };
        let best = self.best;
        match outcome {
            Ok(done) => {
                if report.improvements.last() != Some(&done.cost) {
                    report.improvements.push(done.cost);
                }
                report.cost = Some(done.cost);
                report.model = Some(done.model);
            }
            Err(Halt::HardUnsat) => {
                report.status = SolveStatus::HardUnsat;
                report.improvements.clear();
            }
            Err(Halt::Timeout) => {
                report.status = SolveStatus::Timeout;
                report.cost = best.as_ref().map(|b| b.0);
                report.model = best.map(|b| b.1);
            }
            Err(Halt::Resource(m)) => {
                report.status = SolveStatus::ResourceLimit;
                report.message = Some(m);
                report.cost = best.as_ref().map(|b| b.0);
                report.model = best.map(|b| b.1);
            }
            Err(Halt::Fail(e)) => return Err(e),
        }
        Ok(report)
    }
}

/// Soft-weight sum as a bound value.
pub(crate) fn as_bound<W: WeightValue>(w: W) -> Result<i128, Halt> {
    Ok(w.to_i128_checked()?)
}

/// The SAT engine refuted a query that the hard-clause check guarantees
/// to be satisfiable.
pub(crate) fn inconsistent(what: &str) -> Halt {
    Halt::Fail(Error::InvalidInstance(format!("unexpected UNSAT answer: {what}")))
}

pub(crate) fn from_bound<W: WeightValue>(k: i128) -> Result<W, Halt> {
    Ok(W::from_i128_checked(k)?)
}
