use crate::sat::SatOutcome;
use crate::wcnf::{Assignment, WeightValue};

use super::session::{as_bound, inconsistent, Flow, Session};
use super::trace::CallOutcome;

/// Raises `LB` from 0 until `Σ w_i·b_i ≤ LB` becomes satisfiable.
pub(super) fn linear_unsat<W: WeightValue>(s: &mut Session<W>) -> Flow<W> {
    let n = s.inst.soft().len();
    let bs = s.relax_all();
    let terms = s.terms(&bs, 0..n);
    let ws = s.weight_set(0..n)?;
    let mut lb = 0i128;
    s.set_initial(Some(lb), None);
    loop {
        let (root, g) = s.pb_leq(terms.clone(), lb)?;
        let out = s.solve(&[root])?;
        s.retire(g);
        match out {
            SatOutcome::Sat(m) => {
                let c = s.observe(&m)?;
                let r = s.record(CallOutcome::Sat);
                r.lb = Some(lb);
                r.mid = Some(lb);
                r.model_cost = Some(as_bound(c)?);
                return s.done(c, &m);
            }
            _ => {
                if lb >= ws.sum() {
                    return Err(inconsistent("bound at the soft-weight total"));
                }
                let mid = lb;
                lb = s.update_bound(&ws, lb);
                let r = s.record(CallOutcome::Unsat);
                r.lb = Some(lb);
                r.mid = Some(mid);
            }
        }
    }
}

/// Lowers `UB` from `1 + Σw` through the costs of successive models until
/// `Σ w_i·b_i ≤ UB − 1` becomes unsatisfiable.
pub(super) fn linear_sat<W: WeightValue>(s: &mut Session<W>, first: Assignment) -> Flow<W> {
    let n = s.inst.soft().len();
    let bs = s.relax_all();
    let terms = s.terms(&bs, 0..n);
    let mut ub = as_bound(s.inst.soft_weight_sum())? + 1;
    s.set_initial(None, Some(ub));
    let mut last: Option<Assignment> = None;
    loop {
        let query = ub - 1;
        let (root, g) = s.pb_leq(terms.clone(), query)?;
        let out = s.solve(&[root])?;
        s.retire(g);
        match out {
            SatOutcome::Sat(m) => {
                let c = s.observe(&m)?;
                ub = as_bound(c)?;
                let r = s.record(CallOutcome::Sat);
                r.ub = Some(ub);
                r.mid = Some(query);
                r.model_cost = Some(ub);
                last = Some(m);
            }
            _ => {
                let r = s.record(CallOutcome::Unsat);
                r.ub = Some(ub);
                r.mid = Some(query);
                let m = last.unwrap_or(first);
                let c = s.cost(&m)?;
                return s.done(c, &m);
            }
        }
    }
}
