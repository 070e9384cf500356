//! Incremental CDCL SAT solver: two watched literals, first-UIP learning,
//! VSIDS with phase saving, Luby restarts and activity-based learnt-clause
//! deletion. Solving under assumptions reports the failed subset.

mod heap;

use std::collections::{BTreeSet, HashMap};
use std::time::Instant;

use heap::VarHeap;

use crate::error::{Error, Result};
use crate::wcnf::{Assignment, Clause, Lit, Var};

const RESTART_BASE: f64 = 100.0;
const VAR_DECAY: f64 = 0.95;
const CLAUSE_DECAY: f64 = 0.999;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatOutcome {
    Sat(Assignment),
    /// `failed` is a subset of the assumptions that is already unsatisfiable
    /// together with the clause database (empty when the database alone is).
    Unsat {
        failed: Vec<Lit>,
    },
    /// Conflict budget or deadline ran out first.
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatStatus {
    Sat,
    Unsat,
    Unknown,
}

impl SatOutcome {
    pub fn status(&self) -> SatStatus {
        match self {
            SatOutcome::Sat(_) => SatStatus::Sat,
            SatOutcome::Unsat { .. } => SatStatus::Unsat,
            SatOutcome::Unknown => SatStatus::Unknown,
        }
    }

    pub fn is_sat(&self) -> bool {
        matches!(self, SatOutcome::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SatOutcome::Unsat { .. })
    }

    pub fn model(&self) -> Option<&Assignment> {
        match self {
            SatOutcome::Sat(m) => Some(m),
            _ => None,
        }
    }

    pub fn failed(&self) -> Option<&[Lit]> {
        match self {
            SatOutcome::Unsat { failed } => Some(failed),
            _ => None,
        }
    }
}

/// Maps failed selector assumptions back to soft-clause indices.
pub fn core_from_selectors(outcome: &SatOutcome, selector_to_soft: &HashMap<Lit, usize>) -> Result<BTreeSet<usize>> {
    match outcome {
        SatOutcome::Unsat { failed } => Ok(failed.iter().filter_map(|l| selector_to_soft.get(l).copied()).collect()),
        _ => Err(Error::NotUnsat),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SatStats {
    pub solves: u64,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
}

type CRef = u32;

#[derive(Debug, Clone)]
struct ClauseData {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    cref: CRef,
    blocker: Lit,
}

const UNDEF: i8 = 0;
const TRUE: i8 = 1;
const FALSE: i8 = -1;

#[inline]
fn value_of(vals: &[i8], l: Lit) -> i8 {
    vals[l.code()]
}

#[derive(Debug, Clone)]
pub struct SatSolver {
    num_vars: usize,
    clauses: Vec<ClauseData>,
    learnts: Vec<CRef>,
    num_deleted: usize,
    watches: Vec<Vec<Watcher>>,
    vals: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<Option<CRef>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    order: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    ok: bool,
    max_learnts: f64,
    seed_state: u64,
    conflict_limit: Option<u64>,
    deadline: Option<Instant>,
    stats: SatStats,
    dump: Option<Vec<Vec<Lit>>>,
}

impl Default for SatSolver {
    fn default() -> Self {
        SatSolver::new()
    }
}

impl SatSolver {
    pub fn new() -> Self {
        SatSolver::with_seed(0)
    }

    /// A nonzero seed perturbs the initial variable order; zero keeps the
    /// plain index order. Either way the solver is deterministic.
    pub fn with_seed(seed: u64) -> Self {
        SatSolver {
            num_vars: 0,
            clauses: Vec::new(),
            learnts: Vec::new(),
            num_deleted: 0,
            watches: Vec::new(),
            vals: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            order: VarHeap::default(),
            phase: Vec::new(),
            seen: Vec::new(),
            ok: true,
            max_learnts: 0.0,
            seed_state: seed,
            conflict_limit: None,
            deadline: None,
            stats: SatStats::default(),
            dump: None,
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars as u32
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.iter().filter(|c| !c.learnt && !c.deleted).count()
    }

    pub fn stats(&self) -> SatStats {
        self.stats
    }

    /// False once the database is known to be unsatisfiable on its own.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    /// Conflicts allowed per `solve` call; `None` means unlimited.
    pub fn set_conflict_limit(&mut self, limit: Option<u64>) {
        self.conflict_limit = limit;
    }

    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.deadline = deadline;
    }

    /// Starts recording every added clause for [`SatSolver::dimacs_dump`].
    pub fn enable_dump(&mut self) {
        if self.dump.is_none() {
            self.dump = Some(Vec::new());
        }
    }

    pub fn dimacs_dump(&self) -> Option<String> {
        let clauses = self.dump.as_ref()?;
        let mut out = format!("p cnf {} {}\n", self.num_vars, clauses.len());
        for c in clauses {
            for l in c {
                out.push_str(&l.to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        Some(out)
    }

    pub fn new_var(&mut self) -> Var {
        self.reserve_vars(self.num_vars as u32 + 1);
        Var::new(self.num_vars as u32)
    }

    /// Makes sure variables `1..=n` exist.
    pub fn reserve_vars(&mut self, n: u32) {
        let n = n as usize;
        while self.num_vars < n {
            let v = self.num_vars;
            self.num_vars += 1;
            self.vals.extend_from_slice(&[UNDEF, UNDEF]);
            self.watches.push(Vec::new());
            self.watches.push(Vec::new());
            self.level.push(0);
            self.reason.push(None);
            self.phase.push(false);
            self.seen.push(false);
            let act = if self.seed_state != 0 {
                self.next_random() * 1e-5
            } else {
                0.0
            };
            self.activity.push(act);
            self.order.insert(v, &self.activity);
        }
    }

    fn next_random(&mut self) -> f64 {
        // xorshift64*; only used to jitter initial activities.
        let mut x = self.seed_state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.seed_state = x;
        (x.wrapping_mul(0x2545_F491_4F6C_DD1D) >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn add_clause_ref(&mut self, c: &Clause) -> bool {
        self.add_clause(c.lits())
    }

    /// Adds a permanent clause. Returns false if the database became
    /// unsatisfiable (which is not an error).
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if let Some(d) = self.dump.as_mut() {
            d.push(lits.to_vec());
        }
        let max_var = lits.iter().map(|l| l.var().get()).max().unwrap_or(0);
        self.reserve_vars(max_var);
        if !self.ok {
            return false;
        }
        debug_assert_eq!(self.decision_level(), 0);

        let mut ps: Vec<Lit> = lits.to_vec();
        ps.sort_unstable();
        ps.dedup();
        let mut out = Vec::with_capacity(ps.len());
        for (i, &l) in ps.iter().enumerate() {
            if i + 1 < ps.len() && ps[i + 1] == !l {
                return true; // tautology
            }
            match value_of(&self.vals, l) {
                TRUE => return true,
                FALSE => {}
                _ => out.push(l),
            }
        }
        match out.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(out[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                // Keep the caller's order for the watched pair, which makes
                // decisions easier to follow when debugging.
                let mut ordered: Vec<Lit> = Vec::with_capacity(out.len());
                for &l in lits {
                    if out.contains(&l) && !ordered.contains(&l) {
                        ordered.push(l);
                    }
                }
                self.attach(ordered, false);
                true
            }
        }
    }

    pub fn solve(&mut self) -> SatOutcome {
        self.solve_with_assumptions(&[])
    }

    pub fn solve_with_assumptions(&mut self, assumptions: &[Lit]) -> SatOutcome {
        self.stats.solves += 1;
        let max_var = assumptions.iter().map(|l| l.var().get()).max().unwrap_or(0);
        self.reserve_vars(max_var);
        if !self.ok {
            return SatOutcome::Unsat { failed: Vec::new() };
        }
        if self.num_deleted * 2 > self.clauses.len().max(64) {
            self.collect_garbage();
        }
        self.max_learnts = (self.num_clauses() as f64 / 3.0).max(2000.0);
        let start_conflicts = self.stats.conflicts;

        let mut restart = 0u32;
        let outcome = loop {
            let budget = (luby(2.0, restart) * RESTART_BASE) as u64;
            match self.search(budget, assumptions, start_conflicts) {
                Search::Restart => {
                    restart += 1;
                    self.stats.restarts += 1;
                    self.max_learnts *= 1.05;
                }
                Search::Done(o) => break o,
            }
        };
        self.cancel_until(0);
        outcome
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn out_of_budget(&self, start_conflicts: u64) -> bool {
        if let Some(lim) = self.conflict_limit {
            if self.stats.conflicts - start_conflicts >= lim {
                return true;
            }
        }
        if let Some(d) = self.deadline {
            if Instant::now() >= d {
                return true;
            }
        }
        false
    }

    fn search(&mut self, budget: u64, assumptions: &[Lit], start_conflicts: u64) -> Search {
        let mut conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Search::Done(SatOutcome::Unsat { failed: Vec::new() });
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let first = learnt[0];
                    let cref = self.attach(learnt, true);
                    self.bump_clause(cref);
                    self.enqueue(first, Some(cref));
                }
                self.var_inc /= VAR_DECAY;
                self.cla_inc /= CLAUSE_DECAY;
                if (self.conflict_limit.is_some() || conflicts.is_multiple_of(64))
                    && self.out_of_budget(start_conflicts)
                {
                    return Search::Done(SatOutcome::Unknown);
                }
                continue;
            }

            if conflicts >= budget {
                self.cancel_until(0);
                if self.deadline.is_some_and(|d| Instant::now() >= d) {
                    return Search::Done(SatOutcome::Unknown);
                }
                return Search::Restart;
            }
            if self.learnts.len() as f64 - self.trail.len() as f64 >= self.max_learnts {
                self.reduce_db();
            }

            let mut next = None;
            while self.decision_level() < assumptions.len() {
                let p = assumptions[self.decision_level()];
                match value_of(&self.vals, p) {
                    TRUE => self.trail_lim.push(self.trail.len()),
                    FALSE => {
                        let failed = self.analyze_final(!p);
                        return Search::Done(SatOutcome::Unsat { failed });
                    }
                    _ => {
                        next = Some(p);
                        break;
                    }
                }
            }
            let next = match next {
                Some(p) => p,
                None => match self.pick_branch() {
                    Some(p) => {
                        self.stats.decisions += 1;
                        p
                    }
                    None => {
                        let values = (0..self.num_vars).map(|v| self.vals[2 * v] == TRUE).collect();
                        return Search::Done(SatOutcome::Sat(Assignment::new(values)));
                    }
                },
            };
            self.trail_lim.push(self.trail.len());
            self.enqueue(next, None);
        }
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.order.pop(&self.activity) {
            if self.vals[2 * v] == UNDEF {
                return Some(Lit::new(Var::from_index(v), self.phase[v]));
            }
        }
        None
    }

    fn enqueue(&mut self, l: Lit, reason: Option<CRef>) {
        let v = l.var().index();
        self.vals[l.code()] = TRUE;
        self.vals[(!l).code()] = FALSE;
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn cancel_until(&mut self, level: usize) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var().index();
            self.vals[l.code()] = UNDEF;
            self.vals[(!l).code()] = UNDEF;
            self.reason[v] = None;
            self.phase[v] = l.is_positive();
            self.order.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level);
        self.qhead = lim;
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> CRef {
        debug_assert!(lits.len() >= 2);
        let cref = self.clauses.len() as CRef;
        self.watches[lits[0].code()].push(Watcher { cref, blocker: lits[1] });
        self.watches[lits[1].code()].push(Watcher { cref, blocker: lits[0] });
        self.clauses.push(ClauseData {
            lits,
            learnt,
            deleted: false,
            activity: 0.0,
        });
        if learnt {
            self.learnts.push(cref);
        }
        cref
    }

    /// Unit propagation. `watches[l]` holds clauses watching `l`; they are
    /// visited when `l` becomes false.
    fn propagate(&mut self) -> Option<CRef> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let (mut i, mut j) = (0, 0);
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if value_of(&self.vals, w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let c = &mut self.clauses[w.cref as usize];
                if c.deleted {
                    continue;
                }
                if c.lits[0] == false_lit {
                    c.lits.swap(0, 1);
                }
                let first = c.lits[0];
                if first != w.blocker && value_of(&self.vals, first) == TRUE {
                    ws[j] = Watcher {
                        cref: w.cref,
                        blocker: first,
                    };
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..c.lits.len() {
                    if value_of(&self.vals, c.lits[k]) != FALSE {
                        c.lits.swap(1, k);
                        let nw = c.lits[1];
                        self.watches[nw.code()].push(Watcher {
                            cref: w.cref,
                            blocker: first,
                        });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher {
                    cref: w.cref,
                    blocker: first,
                };
                j += 1;
                if value_of(&self.vals, first) == FALSE {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(w.cref));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: CRef) {
        let c = &mut self.clauses[cref as usize];
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &r in &self.learnts {
                self.clauses[r as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first, highest remaining level second) and the backjump level.
    fn analyze(&mut self, mut confl: CRef) -> (Vec<Lit>, usize) {
        let mut learnt = vec![Lit::from_code(0)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        let dl = self.decision_level() as u32;

        loop {
            if self.clauses[confl as usize].learnt {
                self.bump_clause(confl);
            }
            let skip = usize::from(p.is_some());
            let n = self.clauses[confl as usize].lits.len();
            for k in skip..n {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var().index();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] >= dl {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var().index()] {
                    break;
                }
            }
            let lit = self.trail[idx];
            let v = lit.var().index();
            self.seen[v] = false;
            path -= 1;
            p = Some(lit);
            if path == 0 {
                break;
            }
            confl = self.reason[v].expect("implied literal has a reason");
        }
        learnt[0] = !p.expect("conflict at positive level");

        // Drop literals implied by other literals of the clause.
        let marked: Vec<Lit> = learnt[1..].to_vec();
        let mut keep = vec![learnt[0]];
        for &q in &marked {
            let v = q.var().index();
            let redundant = match self.reason[v] {
                None => false,
                Some(r) => self.clauses[r as usize].lits[1..].iter().all(|&x| {
                    let xv = x.var().index();
                    self.seen[xv] || self.level[xv] == 0
                }),
            };
            if !redundant {
                keep.push(q);
            }
        }
        for q in marked {
            self.seen[q.var().index()] = false;
        }
        let mut learnt = keep;

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for k in 2..learnt.len() {
                if self.level[learnt[k].var().index()] > self.level[learnt[max_i].var().index()] {
                    max_i = k;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var().index()] as usize
        };
        (learnt, bt)
    }

    /// Collects the assumptions responsible for `p` being true, where `p` is
    /// the negation of an assumption that turned out false.
    fn analyze_final(&mut self, p: Lit) -> Vec<Lit> {
        let mut out = vec![!p];
        if self.decision_level() == 0 {
            return out;
        }
        self.seen[p.var().index()] = true;
        for i in (self.trail_lim[0]..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var().index();
            if !self.seen[v] {
                continue;
            }
            match self.reason[v] {
                None => {
                    debug_assert!(self.level[v] > 0);
                    if !out.contains(&l) {
                        out.push(l);
                    }
                }
                Some(r) => {
                    for k in 1..self.clauses[r as usize].lits.len() {
                        let x = self.clauses[r as usize].lits[k].var().index();
                        if self.level[x] > 0 {
                            self.seen[x] = true;
                        }
                    }
                }
            }
            self.seen[v] = false;
        }
        self.seen[p.var().index()] = false;
        out
    }

    fn locked(&self, cref: CRef) -> bool {
        let c = &self.clauses[cref as usize];
        let l = c.lits[0];
        value_of(&self.vals, l) == TRUE && self.reason[l.var().index()] == Some(cref)
    }

    fn reduce_db(&mut self) {
        let mut ls = std::mem::take(&mut self.learnts);
        ls.sort_by(|&a, &b| {
            self.clauses[a as usize]
                .activity
                .total_cmp(&self.clauses[b as usize].activity)
        });
        let half = ls.len() / 2;
        let mut kept = Vec::with_capacity(ls.len());
        for (i, &cref) in ls.iter().enumerate() {
            let c = &self.clauses[cref as usize];
            if i < half && c.lits.len() > 2 && !self.locked(cref) {
                let c = &mut self.clauses[cref as usize];
                c.deleted = true;
                c.lits = Vec::new();
                self.num_deleted += 1;
            } else {
                kept.push(cref);
            }
        }
        self.learnts = kept;
    }

    /// Compacts the clause arena. Only called at decision level 0, where
    /// reasons are never consulted.
    fn collect_garbage(&mut self) {
        debug_assert_eq!(self.decision_level(), 0);
        let old = std::mem::take(&mut self.clauses);
        let mut learnts = Vec::new();
        for w in &mut self.watches {
            w.clear();
        }
        for c in old.into_iter().filter(|c| !c.deleted) {
            let cref = self.clauses.len() as CRef;
            self.watches[c.lits[0].code()].push(Watcher {
                cref,
                blocker: c.lits[1],
            });
            self.watches[c.lits[1].code()].push(Watcher {
                cref,
                blocker: c.lits[0],
            });
            if c.learnt {
                learnts.push(cref);
            }
            self.clauses.push(c);
        }
        self.learnts = learnts;
        for r in &mut self.reason {
            *r = None;
        }
        self.num_deleted = 0;
    }
}

enum Search {
    Restart,
    Done(SatOutcome),
}

/// The Luby sequence 1,1,2,1,1,2,4,... scaled by powers of `y`.
fn luby(y: f64, mut x: u32) -> f64 {
    let (mut size, mut seq) = (1u32, 0i32);
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lit(v: i32) -> Lit {
        Lit::from_dimacs(v)
    }

    fn solver(clauses: &[&[i32]]) -> SatSolver {
        let mut s = SatSolver::new();
        for c in clauses {
            let lits: Vec<Lit> = c.iter().map(|&v| lit(v)).collect();
            s.add_clause(&lits);
        }
        s
    }

    fn brute_sat(n: u32, clauses: &[Vec<i32>], fixed: &[i32]) -> bool {
        (0..1u64 << n).any(|m| {
            let val = |v: i32| {
                let b = m >> (v.unsigned_abs() - 1) & 1 == 1;
                if v > 0 {
                    b
                } else {
                    !b
                }
            };
            fixed.iter().all(|&f| val(f)) && clauses.iter().all(|c| c.iter().any(|&l| val(l)))
        })
    }

    #[test]
    fn luby_prefix() {
        let seq: Vec<f64> = (0..15).map(|i| luby(2.0, i)).collect();
        assert_eq!(seq, vec![1., 1., 2., 1., 1., 2., 4., 1., 1., 2., 1., 1., 2., 4., 8.]);
    }

    #[test]
    fn contradictory_units() {
        let mut s = solver(&[&[1], &[-1]]);
        assert!(s.solve().is_unsat());
        assert!(!s.is_ok());
    }

    #[test]
    fn single_clause_model_checks() {
        let mut s = solver(&[&[1, 2]]);
        let m = s.solve().model().cloned().unwrap();
        assert!(m.satisfies(&Clause::from_dimacs(&[1, 2])));
    }

    #[test]
    fn pigeonhole_three_into_two_is_unsat() {
        // p_{i,j}: pigeon i in hole j, var = 2*i + j + 1
        let mut cls: Vec<Vec<i32>> = Vec::new();
        for i in 0..3 {
            cls.push(vec![2 * i + 1, 2 * i + 2]);
        }
        for j in 0..2 {
            for a in 0..3 {
                for b in a + 1..3 {
                    cls.push(vec![-(2 * a + j + 1), -(2 * b + j + 1)]);
                }
            }
        }
        assert!(!brute_sat(6, &cls, &[]));
        let refs: Vec<&[i32]> = cls.iter().map(|c| c.as_slice()).collect();
        assert!(solver(&refs).solve().is_unsat());
    }

    #[test]
    fn failed_assumptions_pick_the_responsible_selector() {
        // (x1 ∨ s1), (¬x1 ∨ s2), (¬x1) with s1 = 2, s2 = 3.
        let cls = vec![vec![1, 2], vec![-1, 3], vec![-1]];
        // Enumeration: assuming only ¬s1 is already infeasible, assuming only
        // ¬s2 is feasible (x1 = false, s1 = true).
        assert!(!brute_sat(3, &cls, &[-2]));
        assert!(brute_sat(3, &cls, &[-3]));
        let refs: Vec<&[i32]> = cls.iter().map(|c| c.as_slice()).collect();
        let mut s = solver(&refs);
        let out = s.solve_with_assumptions(&[lit(-2), lit(-3)]);
        assert_eq!(out.failed().unwrap(), &[lit(-2)]);
    }

    #[test]
    fn complementary_assumptions() {
        let mut s = solver(&[&[1, 2]]);
        let out = s.solve_with_assumptions(&[lit(3), lit(-3)]);
        let mut failed = out.failed().unwrap().to_vec();
        failed.sort();
        assert_eq!(failed, vec![lit(3), lit(-3)]);
        // the solver stays usable
        assert!(s.solve_with_assumptions(&[lit(3)]).is_sat());
    }

    #[test]
    fn database_unsat_gives_empty_failed_set() {
        let mut s = solver(&[&[1], &[-1, 2], &[-2]]);
        let out = s.solve_with_assumptions(&[lit(3)]);
        assert_eq!(out.failed().unwrap(), &[] as &[Lit]);
        let map: HashMap<Lit, usize> = [(lit(3), 0)].into_iter().collect();
        assert!(core_from_selectors(&out, &map).unwrap().is_empty());
    }

    #[test]
    fn core_from_sat_outcome_is_an_error() {
        let mut s = solver(&[&[1]]);
        let out = s.solve();
        assert_eq!(core_from_selectors(&out, &HashMap::new()), Err(Error::NotUnsat));
    }

    #[test]
    fn disjoint_cores_report_one_group() {
        // group A over x1 with selectors 10, 11; group B over x2 with 20, 21
        let mut s = solver(&[&[1, 10], &[-1, 11], &[2, 20], &[-2, 21]]);
        let assumptions = [lit(-10), lit(-11), lit(-20), lit(-21)];
        let map: HashMap<Lit, usize> = assumptions.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let out = s.solve_with_assumptions(&assumptions);
        let core = core_from_selectors(&out, &map).unwrap();
        let a: BTreeSet<usize> = [0, 1].into();
        let b: BTreeSet<usize> = [2, 3].into();
        assert!(core.is_subset(&a) || core.is_subset(&b), "{core:?}");
        assert!(!core.is_empty());
    }

    #[test]
    fn conflict_limit_yields_unknown() {
        // pigeonhole 7 into 6 needs many conflicts
        let (p, h) = (7, 6);
        let var = |i: i32, j: i32| i * h + j + 1;
        let mut s = SatSolver::new();
        for i in 0..p {
            let c: Vec<Lit> = (0..h).map(|j| lit(var(i, j))).collect();
            s.add_clause(&c);
        }
        for j in 0..h {
            for a in 0..p {
                for b in a + 1..p {
                    s.add_clause(&[lit(-var(a, j)), lit(-var(b, j))]);
                }
            }
        }
        s.set_conflict_limit(Some(10));
        assert_eq!(s.solve(), SatOutcome::Unknown);
        s.set_conflict_limit(None);
        assert!(s.solve().is_unsat());
    }

    #[test]
    fn dump_lists_added_clauses() {
        let mut s = SatSolver::new();
        assert!(s.dimacs_dump().is_none());
        s.enable_dump();
        s.add_clause(&[lit(1), lit(-2)]);
        assert_eq!(s.dimacs_dump().unwrap(), "p cnf 2 1\n1 -2 0\n");
    }

    fn random_3cnf(rng: &mut ChaCha8Rng, n: u32, m: usize) -> Vec<Vec<i32>> {
        (0..m)
            .map(|_| {
                (0..3)
                    .map(|_| {
                        let v = rng.gen_range(1..=n) as i32;
                        if rng.gen() {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect()
            })
            .collect()
    }

    fn check_against_brute(seed: u64, solver_seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=12);
        let m = (f64::from(n) * rng.gen_range(3.0..6.0)) as usize;
        let cls = random_3cnf(&mut rng, n, m);
        let mut s = SatSolver::with_seed(solver_seed);
        for c in &cls {
            let lits: Vec<Lit> = c.iter().map(|&v| lit(v)).collect();
            s.add_clause(&lits);
        }
        let k = rng.gen_range(0..=3usize);
        let assumptions: Vec<i32> = (0..k)
            .map(|_| {
                let v = rng.gen_range(1..=n) as i32;
                if rng.gen() {
                    v
                } else {
                    -v
                }
            })
            .collect();
        let a_lits: Vec<Lit> = assumptions.iter().map(|&v| lit(v)).collect();
        let expected = brute_sat(n, &cls, &assumptions);
        match s.solve_with_assumptions(&a_lits) {
            SatOutcome::Sat(m) => {
                assert!(expected, "seed {seed}");
                for c in &cls {
                    assert!(m.satisfies(&Clause::from_dimacs(c)));
                }
                for &l in &a_lits {
                    assert!(m.lit_value(l));
                }
            }
            SatOutcome::Unsat { failed } => {
                assert!(!expected, "seed {seed}");
                for l in &failed {
                    assert!(a_lits.contains(l));
                }
                let f: Vec<i32> = failed.iter().map(|l| l.to_dimacs() as i32).collect();
                assert!(!brute_sat(n, &cls, &f), "failed set is not a core, seed {seed}");
            }
            SatOutcome::Unknown => panic!("no limits set"),
        }
        // second call on the same solver without assumptions
        let again = s.solve();
        assert_eq!(again.is_sat(), brute_sat(n, &cls, &[]));
    }

    #[test]
    fn agrees_with_enumeration_on_random_3cnf() {
        for seed in 0..3000 {
            check_against_brute(seed, 0);
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cls = random_3cnf(&mut rng, 40, 160);
        let run = || {
            let mut s = SatSolver::with_seed(99);
            for c in &cls {
                let lits: Vec<Lit> = c.iter().map(|&v| lit(v)).collect();
                s.add_clause(&lits);
            }
            (s.solve(), s.stats())
        };
        assert_eq!(run(), run());
    }

    proptest! {
        #[test]
        fn seeded_solver_agrees(seed in 0u64..1_000_000, sseed in 1u64..1000) {
            check_against_brute(seed, sseed);
        }
    }
}
