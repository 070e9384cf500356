//! fumalik, WPM1 and stratified WPM1: relax every soft clause of each
//! core with a fresh blocking variable, splitting weights at the core
//! minimum, and tie the new variables together with exactly-one.

use std::collections::HashMap;

use crate::sat::SatOutcome;
use crate::wcnf::{Clause, Lit, WeightValue};

use super::session::{as_bound, inconsistent, Flow, Halt, Session};
use super::trace::{CallOutcome, Note};
use super::{Algorithm, Diversity};

/// A weighted copy of a soft clause in the working formula, guarded by an
/// assumption literal.
struct Copy<W> {
    clause: Clause,
    weight: W,
    origin: usize,
    guard: Lit,
    live: bool,
}

struct Working<W> {
    copies: Vec<Copy<W>>,
    by_clause: HashMap<Vec<Lit>, usize>,
}

impl<W: WeightValue> Working<W> {
    fn add(&mut self, s: &mut Session<W>, clause: Clause, weight: W, origin: usize, share: bool) -> Result<(), Halt> {
        let key = clause.sorted_lits();
        if share {
            if let Some(&j) = self.by_clause.get(&key) {
                if self.copies[j].live {
                    self.copies[j].weight = self.copies[j].weight.add_checked(weight)?;
                    return Ok(());
                }
            }
        }
        let guard = s.fresh().pos();
        s.add_hard(clause.with_lit(!guard));
        self.by_clause.insert(key, self.copies.len());
        self.copies.push(Copy {
            clause,
            weight,
            origin,
            guard,
            live: true,
        });
        Ok(())
    }

    fn kill(&mut self, s: &mut Session<W>, j: usize) {
        self.copies[j].live = false;
        s.add_hard(Clause::new([!self.copies[j].guard]));
    }

    fn sum(&self) -> Result<i128, Halt> {
        let mut t = 0i128;
        for c in self.copies.iter().filter(|c| c.live) {
            t += as_bound(c.weight)?;
        }
        Ok(t)
    }
}

/// Next stratum below `w_max`, or zero when every live copy is already
/// included.
fn next_stratum<W: WeightValue>(w: &Working<W>, w_max: W, rule: Diversity) -> W {
    let below: Vec<W> = w
        .copies
        .iter()
        .filter(|c| c.live && c.weight < w_max)
        .map(|c| c.weight)
        .collect();
    let mut distinct = below.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let Some(&largest) = distinct.last() else {
        return W::zero();
    };
    match rule {
        Diversity::Median if (distinct.len() as f64) > (below.len() as f64).sqrt() => distinct[distinct.len() / 2],
        _ => largest,
    }
}

pub(super) fn wpm1<W: WeightValue>(s: &mut Session<W>, stratified: bool) -> Flow<W> {
    let fu_malik = s.cfg.algorithm == Algorithm::FuMalik;
    let share = !fu_malik;
    let mut w = Working {
        copies: Vec::new(),
        by_clause: HashMap::new(),
    };
    for (i, sc) in s.inst.soft().iter().enumerate() {
        if !sc.clause.is_tautology() {
            w.add(s, sc.clause.clone(), sc.weight, i, false)?;
        }
    }
    // Repeated cores reuse their blocking variables.
    let mut seen_cores: HashMap<Vec<Vec<Lit>>, Vec<Lit>> = HashMap::new();
    let mut cost = W::zero();
    let mut w_max = if stratified {
        w.copies.iter().map(|c| c.weight).max().unwrap_or_else(W::zero)
    } else {
        W::zero()
    };
    s.set_initial(Some(0), None);

    loop {
        let active: Vec<usize> = (0..w.copies.len())
            .filter(|&j| w.copies[j].live && w.copies[j].weight >= w_max)
            .collect();
        let assumptions: Vec<Lit> = active.iter().map(|&j| w.copies[j].guard).collect();
        let out = s.solve(&assumptions)?;
        match out {
            SatOutcome::Sat(m) => {
                let c = as_bound(s.observe(&m)?)?;
                let next = if w_max.is_zero() {
                    W::zero()
                } else {
                    next_stratum(&w, w_max, s.cfg.diversity)
                };
                let r = s.record(CallOutcome::Sat);
                r.lb = Some(as_bound(cost)?);
                r.model_cost = Some(c);
                if stratified {
                    r.notes.push(Note::Stratum {
                        w_max: as_bound(w_max)?,
                    });
                }
                // Every live copy took part in this call.
                if next.is_zero() && w.copies.iter().all(|c| !c.live || c.weight >= w_max) {
                    return s.done(cost, &m);
                }
                w_max = next;
            }
            SatOutcome::Unsat { failed } => {
                let guards: HashMap<Lit, usize> = active.iter().map(|&j| (w.copies[j].guard, j)).collect();
                let mut core: Vec<usize> = failed.iter().filter_map(|l| guards.get(l).copied()).collect();
                core.sort_unstable();
                if core.is_empty() {
                    return Err(inconsistent("core without soft clauses"));
                }
                let w_min = core.iter().map(|&j| w.copies[j].weight).min().expect("non-empty core");

                let mut key: Vec<Vec<Lit>> = core.iter().map(|&j| w.copies[j].clause.sorted_lits()).collect();
                key.sort();
                let repeated = key.windows(2).any(|p| p[0] == p[1]);
                let reuse = if share && !repeated {
                    seen_cores.get(&key).cloned()
                } else {
                    None
                };
                let mut fresh_bs = Vec::new();
                for &j in &core {
                    let (clause, weight, origin) = (w.copies[j].clause.clone(), w.copies[j].weight, w.copies[j].origin);
                    if weight == w_min {
                        w.kill(s, j);
                    } else {
                        w.copies[j].weight = weight.sub_checked(w_min)?;
                    }
                    let b = match &reuse {
                        Some(bs) => bs[key.binary_search(&clause.sorted_lits()).expect("clause is in the key")],
                        None => {
                            let b = s.blocking_var(Some(origin)).pos();
                            fresh_bs.push(b);
                            b
                        }
                    };
                    w.add(s, clause.with_lit(b), w_min, origin, share)?;
                }
                let relaxed = fresh_bs.len();
                if reuse.is_none() {
                    s.exactly_one(&fresh_bs)?;
                    if share && !repeated {
                        let mut ordered: Vec<(Vec<Lit>, Lit)> = core
                            .iter()
                            .zip(&fresh_bs)
                            .map(|(&j, &b)| (w.copies[j].clause.sorted_lits(), b))
                            .collect();
                        ordered.sort();
                        seen_cores.insert(key, ordered.into_iter().map(|(_, b)| b).collect());
                    }
                }
                cost = cost.add_checked(w_min)?;
                let working_sum = w.sum()?;
                let r = s.record(CallOutcome::Unsat);
                r.lb = Some(as_bound(cost)?);
                r.core_size = Some(core.len());
                r.relaxed = relaxed;
                if stratified {
                    r.notes.push(Note::Stratum {
                        w_max: as_bound(w_max)?,
                    });
                }
                r.notes.push(Note::Split {
                    w_min: as_bound(w_min)?,
                    working_sum,
                });
                if relaxed > 0 {
                    r.notes.push(Note::ExactlyOne(relaxed));
                }
            }
            SatOutcome::Unknown => unreachable!("mapped to a halt by the session"),
        }
    }
}
