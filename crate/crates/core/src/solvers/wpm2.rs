//! WPM2: each soft clause gets its own blocking variable up front; cores
//! merge disjoint covers and raise their at-most bounds through `NewBound`.

use std::collections::{BTreeSet, HashMap};

use crate::bounds::{new_bound, LinearBound};
use crate::pb::Relation;
use crate::sat::SatOutcome;
use crate::wcnf::{Lit, WeightValue};

use super::session::{as_bound, inconsistent, Flow, GroupId, Session};
use super::trace::{CallOutcome, Note};

struct Cover {
    softs: BTreeSet<usize>,
    k: i128,
    /// Encoded `Σ w_i·b_i ≤ k`; `None` while `k = 0`, which is enforced by
    /// assuming every `¬b_i` instead.
    root: Option<(Lit, GroupId)>,
}

pub(super) fn wpm2<W: WeightValue>(s: &mut Session<W>) -> Flow<W> {
    let n = s.inst.soft().len();
    let bs = s.relax_all();
    let weights: Vec<W> = (0..n).map(|i| s.weight(i)).collect();
    let mut covers: Vec<Cover> = (0..n)
        .filter(|&i| bs[i].is_some())
        .map(|i| Cover {
            softs: BTreeSet::from([i]),
            k: 0,
            root: None,
        })
        .collect();
    let mut al: Vec<LinearBound> = Vec::new();
    s.set_initial(Some(0), None);

    loop {
        let mut owner: HashMap<Lit, usize> = HashMap::new();
        let mut assumptions = Vec::new();
        for (c, cover) in covers.iter().enumerate() {
            match cover.root {
                Some((root, _)) => {
                    owner.insert(root, c);
                    assumptions.push(root);
                }
                None => {
                    for &i in &cover.softs {
                        let l = !bs[i].expect("covers hold relaxed softs");
                        owner.insert(l, c);
                        assumptions.push(l);
                    }
                }
            }
        }
        let lb: i128 = covers.iter().map(|c| c.k).sum();
        match s.solve(&assumptions)? {
            SatOutcome::Sat(m) => {
                let c = s.observe(&m)?;
                let r = s.record(CallOutcome::Sat);
                r.lb = Some(lb);
                r.model_cost = Some(as_bound(c)?);
                return s.done(c, &m);
            }
            SatOutcome::Unsat { failed } => {
                let mut rc: Vec<usize> = failed.iter().filter_map(|l| owner.get(l).copied()).collect();
                rc.sort_unstable();
                rc.dedup();
                if rc.is_empty() {
                    return Err(inconsistent("core without cover bounds"));
                }
                let core_size = failed.iter().filter(|l| owner.contains_key(l)).count();
                let b: BTreeSet<usize> = rc.iter().flat_map(|&c| covers[c].softs.iter().copied()).collect();
                let am: Vec<LinearBound> = covers
                    .iter()
                    .map(|c| LinearBound::at_most(c.softs.clone(), c.k))
                    .collect();
                let k = new_bound(&al, &am, &b, &weights)?;
                let terms = s.terms(&bs, b.iter().copied());

                al.push(LinearBound::at_least(b.clone(), k));
                s.pb_hard(terms.clone(), Relation::Ge, k)?;
                for &c in rc.iter().rev() {
                    if let Some((_, g)) = covers.remove(c).root {
                        s.retire(g);
                    }
                }
                let root = s.pb_leq(terms, k)?;
                covers.push(Cover {
                    softs: b.clone(),
                    k,
                    root: Some(root),
                });

                let r = s.record(CallOutcome::Unsat);
                r.lb = Some(covers.iter().map(|c| c.k).sum());
                r.mid = Some(k);
                r.core_size = Some(core_size);
                r.notes.push(Note::Cover { softs: b, k });
            }
            SatOutcome::Unknown => unreachable!("mapped to a halt by the session"),
        }
    }
}
