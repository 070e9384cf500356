//! WMSU3 and WMSU4: soft clauses are relaxed only once they appear in a
//! core, and the cost bound constrains just the relaxed ones.

use crate::sat::SatOutcome;
use crate::wcnf::{Assignment, WeightValue};

use super::lazy::Lazy;
use super::session::{as_bound, inconsistent, Flow, Session};
use super::trace::CallOutcome;

/// Raises `LB` over the relaxed clauses until the bound becomes satisfiable.
pub(super) fn wmsu3<W: WeightValue>(s: &mut Session<W>) -> Flow<W> {
    let mut lz = Lazy::new(s);
    let mut lb = 0i128;
    s.set_initial(Some(lb), None);
    loop {
        let relaxed = lz.relaxed_set();
        let (root, g) = s.pb_leq(s.terms(&lz.b, relaxed.iter().copied()), lb)?;
        let mut assumptions = lz.assumptions();
        assumptions.push(root);
        let out = s.solve(&assumptions)?;
        s.retire(g);
        match out {
            SatOutcome::Sat(m) => {
                let c = s.observe(&m)?;
                let r = s.record(CallOutcome::Sat);
                r.lb = Some(lb);
                r.mid = Some(lb);
                r.model_cost = Some(as_bound(c)?);
                return s.done(super::session::from_bound(lb)?, &m);
            }
            SatOutcome::Unsat { failed } => {
                let new = lz.unrelaxed_in(&failed);
                lz.relax(s, &new);
                let ws = s.weight_set(lz.relaxed_set())?;
                let mid = lb;
                lb = s.update_bound(&ws, lb);
                if new.is_empty() && lb == mid {
                    return Err(inconsistent("core with every relaxed clause at its bound"));
                }
                let r = s.record(CallOutcome::Unsat);
                r.lb = Some(lb);
                r.mid = Some(mid);
                r.core_size = Some(failed.len());
                r.relaxed = new.len();
            }
            SatOutcome::Unknown => unreachable!("mapped to a halt by the session"),
        }
    }
}

/// Linear search from above whose UNSAT answers also raise `LB`.
pub(super) fn wmsu4<W: WeightValue>(s: &mut Session<W>, first: Assignment) -> Flow<W> {
    let mut lz = Lazy::new(s);
    let mut lb = -1i128;
    let mut ub = as_bound(s.inst.soft_weight_sum())? + 1;
    s.set_initial(Some(lb), Some(ub));
    let mut last = first;
    while ub > lb + 1 {
        let query = ub - 1;
        let (root, g) = s.pb_leq(s.terms(&lz.b, lz.relaxed_set()), query)?;
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
                    lb = ub - 1;
                } else {
                    lz.relax(s, &new);
                    let ws = s.weight_set(lz.relaxed_set())?;
                    lb = lb.max(s.update_bound(&ws, lb));
                }
                (CallOutcome::Unsat, None, Some(failed.len()), new.len())
            }
            SatOutcome::Unknown => unreachable!("mapped to a halt by the session"),
        };
        let r = s.record(outcome);
        r.lb = Some(lb);
        r.ub = Some(ub);
        r.mid = Some(query);
        r.model_cost = cost;
        r.core_size = core;
        r.relaxed = relaxed;
    }
    let c = s.cost(&last)?;
    s.done(c, &last)
}
