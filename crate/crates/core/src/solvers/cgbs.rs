//! Core-guided binary search, plain and with disjoint cores.

use std::collections::{BTreeSet, HashMap};

use crate::sat::SatOutcome;
use crate::wcnf::{Assignment, Lit, WeightValue};

use super::lazy::Lazy;
use super::session::{as_bound, inconsistent, Flow, GroupId, Session};
use super::trace::{CallOutcome, EntrySnapshot, Note};

/// Binary search over the relaxed clauses; cores that contain unrelaxed
/// clauses relax them instead of moving `LB`.
pub(super) fn cgbs<W: WeightValue>(s: &mut Session<W>, first: Assignment) -> Flow<W> {
    let mut lz = Lazy::new(s);
    let mut lb = -1i128;
    let mut ub = as_bound(s.inst.soft_weight_sum())? + 1;
    s.set_initial(Some(lb), Some(ub));
    let mut last = first;
    while lb + 1 < ub {
        let mid = (lb + ub).div_euclid(2);
        let (root, g) = s.pb_leq(s.terms(&lz.b, lz.relaxed_set()), mid)?;
        let mut assumptions = lz.assumptions();
        assumptions.push(root);
        let out = s.solve(&assumptions)?;
        s.retire(g);
        let (outcome, cost, core, relaxed) = match out {
            SatOutcome::Sat(m) => {
                let c = as_bound(s.observe(&m)?)?;
                ub = c;
                last = m;
                (CallOutcome::Sat, Some(c), None, 0)
            }
            SatOutcome::Unsat { failed } => {
                let new = lz.unrelaxed_in(&failed);
                if new.is_empty() {
                    let ws = s.weight_set(lz.relaxed_set())?;
                    lb = lb.max(s.update_bound(&ws, mid) - 1);
                } else {
                    lz.relax(s, &new);
                }
                (CallOutcome::Unsat, None, Some(failed.len()), new.len())
            }
            SatOutcome::Unknown => unreachable!("mapped to a halt by the session"),
        };
        let r = s.record(outcome);
        r.lb = Some(lb);
        r.ub = Some(ub);
        r.mid = Some(mid);
        r.model_cost = cost;
        r.core_size = core;
        r.relaxed = relaxed;
    }
    let c = s.cost(&last)?;
    s.done(c, &last)
}

struct Entry {
    softs: BTreeSet<usize>,
    lb: i128,
    mid: i128,
    ub: i128,
    root: Option<(Lit, GroupId)>,
}

fn snapshot(entries: &[Entry]) -> Vec<EntrySnapshot> {
    entries
        .iter()
        .map(|e| EntrySnapshot {
            softs: e.softs.clone(),
            lb: e.lb,
            mid: e.mid,
            ub: e.ub,
        })
        .collect()
}

/// Binary search run separately on every disjoint core found so far.
pub(super) fn dcgbs<W: WeightValue>(s: &mut Session<W>, first: Assignment) -> Flow<W> {
    let global = s.cfg.dcgbs_global_ub;
    let mut lz = Lazy::new(s);
    let mut entries: Vec<Entry> = Vec::new();
    let mut last = first;
    s.set_initial(Some(0), None);
    loop {
        let mut assumptions = lz.assumptions();
        let mut owner: HashMap<Lit, usize> = HashMap::new();
        for (j, e) in entries.iter_mut().enumerate() {
            e.mid = if e.lb + 1 == e.ub {
                e.ub
            } else {
                (e.lb + e.ub).div_euclid(2)
            };
            if let Some((_, g)) = e.root.take() {
                s.retire(g);
            }
            let (root, g) = s.pb_leq(s.terms(&lz.b, e.softs.iter().copied()), e.mid)?;
            e.root = Some((root, g));
            owner.insert(root, j);
            assumptions.push(root);
        }
        let out = s.solve(&assumptions)?;
        let (outcome, cost, core, relaxed) = match out {
            SatOutcome::Sat(m) => {
                let c = as_bound(s.observe(&m)?)?;
                for e in &mut entries {
                    e.ub = if global {
                        c
                    } else {
                        let mut t = 0;
                        for &i in &e.softs {
                            if !m.satisfies(&s.inst.soft()[i].clause) {
                                t += as_bound(s.weight(i))?;
                            }
                        }
                        t
                    };
                }
                last = m;
                (CallOutcome::Sat, Some(c), None, 0)
            }
            SatOutcome::Unsat { failed } => {
                let new = lz.unrelaxed_in(&failed);
                let mut sub: Vec<usize> = failed.iter().filter_map(|l| owner.get(l).copied()).collect();
                sub.sort_unstable();
                sub.dedup();
                if new.is_empty() && sub.len() == 1 {
                    let e = &mut entries[sub[0]];
                    e.lb = e.mid;
                } else if new.is_empty() && sub.is_empty() {
                    return Err(inconsistent("core without soft clauses"));
                } else {
                    lz.relax(s, &new);
                    let mut softs: BTreeSet<usize> = new.iter().copied().collect();
                    let mut lb = 0i128;
                    let mut ub = 1i128;
                    for &i in &new {
                        ub += as_bound(s.weight(i))?;
                    }
                    for &j in sub.iter().rev() {
                        let e = entries.remove(j);
                        if let Some((_, g)) = e.root {
                            s.retire(g);
                        }
                        softs.extend(e.softs);
                        lb += e.lb;
                        ub += e.ub;
                    }
                    entries.push(Entry {
                        softs,
                        lb,
                        mid: 0,
                        ub,
                        root: None,
                    });
                }
                (CallOutcome::Unsat, None, Some(failed.len()), new.len())
            }
            SatOutcome::Unknown => unreachable!("mapped to a halt by the session"),
        };
        let done = entries.iter().all(|e| e.ub <= e.lb + 1);
        let r = s.record(outcome);
        r.lb = Some(entries.iter().map(|e| e.lb).sum());
        r.model_cost = cost;
        r.core_size = core;
        r.relaxed = relaxed;
        r.notes.push(Note::Entries(snapshot(&entries)));
        // Every entry's UB comes from `last`, so it is optimal within each
        // disjoint core; merged entries always need another SAT answer.
        if done {
            break;
        }
    }
    let c = s.cost(&last)?;
    s.done(c, &last)
}
