use crate::sat::SatOutcome;
use crate::wcnf::{Assignment, WeightValue};

use super::session::{as_bound, Flow, Session};
use super::trace::{CallOutcome, Note, SearchMode};

/// Binary search on the cost; with `alternate`, every other call instead
/// asks for anything better than the current upper bound.
pub(super) fn bin<W: WeightValue>(s: &mut Session<W>, first: Assignment, alternate: bool) -> Flow<W> {
    let n = s.inst.soft().len();
    let bs = s.relax_all();
    let terms = s.terms(&bs, 0..n);
    let ws = s.weight_set(0..n)?;
    let mut lb = -1i128;
    let mut ub = ws.sum() + 1;
    s.set_initial(Some(lb), Some(ub));
    let mut last = first;
    let mut mode = SearchMode::Binary;

    while lb + 1 < ub {
        let mid = match mode {
            SearchMode::Binary => (lb + ub).div_euclid(2),
            SearchMode::Linear => ub - 1,
        };
        let (root, g) = s.pb_leq(terms.clone(), mid)?;
        let out = s.solve(&[root])?;
        s.retire(g);
        let (outcome, cost) = match out {
            SatOutcome::Sat(m) => {
                let c = as_bound(s.observe(&m)?)?;
                ub = c;
                last = m;
                (CallOutcome::Sat, Some(c))
            }
            _ => {
                lb = match mode {
                    SearchMode::Binary => s.update_bound(&ws, mid) - 1,
                    SearchMode::Linear => mid,
                };
                (CallOutcome::Unsat, None)
            }
        };
        let r = s.record(outcome);
        r.lb = Some(lb);
        r.ub = Some(ub);
        r.mid = Some(mid);
        r.model_cost = cost;
        if alternate {
            r.notes.push(Note::Mode(mode));
            mode = match mode {
                SearchMode::Binary => SearchMode::Linear,
                SearchMode::Linear => SearchMode::Binary,
            };
        }
    }
    let c = s.cost(&last)?;
    s.done(c, &last)
}

/// Fixes the bits of the optimum from the most significant one down.
pub(super) fn bitbased<W: WeightValue>(s: &mut Session<W>, first: Assignment) -> Flow<W> {
    let n = s.inst.soft().len();
    let bs = s.relax_all();
    let terms = s.terms(&bs, 0..n);
    let total = as_bound(s.inst.soft_weight_sum())?;
    let mut last = first;
    if total == 0 {
        let c = s.cost(&last)?;
        return s.done(c, &last);
    }
    let k = 127 - i64::from(total.leading_zeros());
    let mut bit = k;
    let mut cost = 1i128 << k;

    while bit >= 0 {
        let (queried_bit, queried) = (bit, cost);
        // Σ w_i·b_i < cost
        let (root, g) = s.pb_leq(terms.clone(), cost - 1)?;
        let out = s.solve(&[root])?;
        s.retire(g);
        let (outcome, found) = match out {
            SatOutcome::Sat(m) => {
                let c = as_bound(s.observe(&m)?)?;
                last = m;
                bit = (0..bit).rev().find(|&j| c >> j & 1 == 1).unwrap_or(-1);
                if bit >= 0 {
                    cost = c >> bit << bit;
                }
                (CallOutcome::Sat, Some(c))
            }
            _ => {
                bit -= 1;
                if bit >= 0 {
                    cost += 1 << bit;
                }
                (CallOutcome::Unsat, None)
            }
        };
        let r = s.record(outcome);
        r.mid = Some(queried - 1);
        r.model_cost = found;
        r.notes.push(Note::Bit {
            bit: queried_bit,
            cost: queried,
        });
    }
    let c = s.cost(&last)?;
    s.done(c, &last)
}
