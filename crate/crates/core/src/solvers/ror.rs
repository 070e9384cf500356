//! WMSU1-ROR: WPM1 whose cores are first simplified with the read-once
//! steps of a resolution refutation. Hard clauses carry selectors too, so
//! cores contain the hard clauses the refutation needs.

use std::collections::HashMap;

use crate::maxres::{get_proof, replay_read_once, WClause};
use crate::sat::SatOutcome;
use crate::wcnf::{Clause, Lit, Weight, WeightValue};

use super::session::{as_bound, inconsistent, Flow, Halt, Session};
use super::trace::{CallOutcome, Note};

struct Entry<W> {
    wc: WClause<W>,
    origin: Option<usize>,
    guard: Lit,
    live: bool,
}

struct Working<W> {
    entries: Vec<Entry<W>>,
}

impl<W: WeightValue> Working<W> {
    fn add(&mut self, s: &mut Session<W>, wc: WClause<W>, origin: Option<usize>) {
        if wc.weight.is_zero() {
            return;
        }
        let guard = s.fresh().pos();
        s.add_hard(wc.clause.with_lit(!guard));
        self.entries.push(Entry {
            wc,
            origin,
            guard,
            live: true,
        });
    }

    fn kill(&mut self, s: &mut Session<W>, j: usize) {
        self.entries[j].live = false;
        s.add_hard(Clause::new([!self.entries[j].guard]));
    }
}

pub(super) fn wmsu1_ror<W: WeightValue>(s: &mut Session<W>) -> Flow<W> {
    s.drop_base();
    let mut w = Working { entries: Vec::new() };
    for c in s.inst.hard() {
        w.add(s, WClause::hard(c.clone()), None);
    }
    for (i, sc) in s.inst.soft().iter().enumerate() {
        if !sc.clause.is_tautology() {
            w.add(s, WClause::soft(sc.clause.clone(), sc.weight), Some(i));
        }
    }
    let mut lb = W::zero();
    s.set_initial(Some(0), None);

    loop {
        let live: Vec<usize> = (0..w.entries.len()).filter(|&j| w.entries[j].live).collect();
        let assumptions: Vec<Lit> = live.iter().map(|&j| w.entries[j].guard).collect();
        match s.solve(&assumptions)? {
            SatOutcome::Sat(m) => {
                let c = s.observe(&m)?;
                let r = s.record(CallOutcome::Sat);
                r.lb = Some(as_bound(lb)?);
                r.model_cost = Some(as_bound(c)?);
                return s.done(lb, &m);
            }
            SatOutcome::Unsat { failed } => {
                let guards: HashMap<Lit, usize> = live.iter().map(|&j| (w.entries[j].guard, j)).collect();
                let mut core: Vec<usize> = failed.iter().filter_map(|l| guards.get(l).copied()).collect();
                core.sort_unstable();
                core.dedup();
                let Some(m) = core.iter().filter_map(|&j| w.entries[j].wc.weight.finite()).min() else {
                    return Err(inconsistent("core without soft clauses"));
                };
                lb = lb.add_checked(m)?;
                for &j in &core {
                    w.kill(s, j);
                }
                let leaves: Vec<WClause<W>> = core.iter().map(|&j| w.entries[j].wc.clone()).collect();
                let origins: Vec<Option<usize>> = core.iter().map(|&j| w.entries[j].origin).collect();

                let mut note = None;
                let rest: Vec<(Option<usize>, WClause<W>)> = match get_proof(&leaves, s.cfg.proof_budget) {
                    Some(proof) => {
                        let replay = replay_read_once(&proof, m)?;
                        note = Some(Note::ReadOnce {
                            steps: replay.applied,
                            derived_empty: replay.derived_empty,
                        });
                        for wc in replay.added {
                            w.add(s, wc, None);
                        }
                        let rest = replay
                            .remaining
                            .into_iter()
                            .map(|(leaf, wc)| (leaf.and_then(|l| origins[l]), wc))
                            .collect();
                        if replay.derived_empty {
                            for (origin, wc) in rest {
                                w.add(s, wc, origin);
                            }
                            record_unsat(s, lb, core.len(), 0, note)?;
                            continue;
                        }
                        rest
                    }
                    None => origins.into_iter().zip(leaves).collect(),
                };

                let mut fresh_bs = Vec::new();
                for (origin, wc) in rest {
                    match wc.weight {
                        Weight::Top => w.add(s, wc, origin),
                        Weight::Finite(weight) => {
                            let b = s.blocking_var(origin).pos();
                            fresh_bs.push(b);
                            w.add(s, WClause::soft(wc.clause.with_lit(b), m), origin);
                            if weight > m {
                                w.add(s, WClause::soft(wc.clause, weight.sub_checked(m)?), origin);
                            }
                        }
                    }
                }
                // The exactly-one clauses are part of the working formula:
                // later refutations may need them.
                if !fresh_bs.is_empty() {
                    for c in crate::pb::encode_exactly_one(&fresh_bs)? {
                        w.add(s, WClause::hard(c), None);
                    }
                }
                record_unsat(s, lb, core.len(), fresh_bs.len(), note)?;
            }
            SatOutcome::Unknown => unreachable!("mapped to a halt by the session"),
        }
    }
}

fn record_unsat<W: WeightValue>(
    s: &mut Session<W>,
    lb: W,
    core: usize,
    relaxed: usize,
    note: Option<Note>,
) -> Result<(), Halt> {
    let r = s.record(CallOutcome::Unsat);
    r.lb = Some(as_bound(lb)?);
    r.core_size = Some(core);
    r.relaxed = relaxed;
    if relaxed > 0 {
        r.notes.push(Note::ExactlyOne(relaxed));
    }
    r.notes.extend(note);
    Ok(())
}
