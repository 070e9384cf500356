//! MaxSAT resolution: the Max-RES rule, resolution proofs with the
//! hard / read-once predicates, a small saturation prover for cores, and
//! read-once replay of a proof against weighted clauses.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::wcnf::{Clause, Lit, Var, Weight, WeightValue};

/// Default number of resolvents `get_proof` may generate.
pub const DEFAULT_PROOF_BUDGET: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WClause<W> {
    pub clause: Clause,
    pub weight: Weight<W>,
}

impl<W: WeightValue> WClause<W> {
    pub fn new(clause: Clause, weight: Weight<W>) -> Self {
        WClause { clause, weight }
    }

    pub fn soft(clause: Clause, w: W) -> Self {
        WClause::new(clause, Weight::Finite(w))
    }

    pub fn hard(clause: Clause) -> Self {
        WClause::new(clause, Weight::Top)
    }
}

/// `u ⊖ w`: plain subtraction, except that Top absorbs.
pub fn weight_minus<W: WeightValue>(u: Weight<W>, w: Weight<W>) -> Result<Weight<W>> {
    match (u, w) {
        (Weight::Top, _) => Ok(Weight::Top),
        (Weight::Finite(a), Weight::Finite(b)) => Ok(Weight::Finite(a.sub_checked(b)?)),
        (Weight::Finite(a), Weight::Top) => Err(Error::WeightUnderflow {
            minuend: a.to_string(),
            subtrahend: "top".into(),
        }),
    }
}

/// Clauses equivalent to `(prefix ∨ ¬(b_1 ∨ … ∨ b_k))`:
/// `(prefix ∨ ¬b_j ∨ b_{j+1} ∨ … ∨ b_k)` for each `j`, tautologies dropped.
fn expand_negated_disjunction(prefix: &[Lit], neg: &[Lit]) -> Vec<Clause> {
    let mut out = Vec::new();
    for j in 0..neg.len() {
        let c = Clause::new(
            prefix
                .iter()
                .copied()
                .chain(std::iter::once(!neg[j]))
                .chain(neg[j + 1..].iter().copied()),
        );
        if !c.is_tautology() {
            out.push(c);
        }
    }
    out
}

/// Splits a clause on `pivot` into the residual literals, checking the
/// pivot occurs with the given sign.
fn residual(c: &Clause, pivot: Var, positive: bool) -> Result<Vec<Lit>> {
    let p = Lit::new(pivot, positive);
    if !c.contains(p) {
        return Err(Error::NoClash { pivot: pivot.get() });
    }
    Ok(c.lits().iter().copied().filter(|&l| l != p).collect())
}

fn push_live<W: WeightValue>(out: &mut Vec<WClause<W>>, clause: Clause, weight: Weight<W>) {
    if !weight.is_zero() && !clause.is_tautology() {
        out.push(WClause { clause, weight });
    }
}

/// Max-RES on `(x ∨ A, u)` and `(¬x ∨ B, w)` with `x = pivot`, moving
/// `m = min(u, w)` of weight into the resolvent.
pub fn max_res<W: WeightValue>(left: &WClause<W>, right: &WClause<W>, pivot: Var) -> Result<Vec<WClause<W>>> {
    let m = left.weight.min(right.weight);
    max_res_amount(left, right, pivot, m)
}

/// Max-RES moving an explicit amount `m ≤ min(u, w)`.
pub fn max_res_amount<W: WeightValue>(
    left: &WClause<W>,
    right: &WClause<W>,
    pivot: Var,
    m: Weight<W>,
) -> Result<Vec<WClause<W>>> {
    let a = residual(&left.clause, pivot, true)?;
    let b = residual(&right.clause, pivot, false)?;
    let x = pivot.pos();
    let mut out = Vec::new();
    if left.weight.is_top() && right.weight.is_top() && m.is_top() {
        // Plain resolution among hard clauses: the parents stay, the
        // resolvent is entailed.
        push_live(&mut out, Clause::new(a.iter().chain(b.iter()).copied()), Weight::Top);
        push_live(&mut out, left.clause.clone(), Weight::Top);
        push_live(&mut out, right.clause.clone(), Weight::Top);
        return Ok(out);
    }
    push_live(&mut out, Clause::new(a.iter().chain(b.iter()).copied()), m);
    push_live(&mut out, left.clause.clone(), weight_minus(left.weight, m)?);
    push_live(&mut out, right.clause.clone(), weight_minus(right.weight, m)?);
    let xa: Vec<Lit> = std::iter::once(x).chain(a.iter().copied()).collect();
    for c in expand_negated_disjunction(&xa, &b) {
        push_live(&mut out, c, m);
    }
    let nxb: Vec<Lit> = std::iter::once(!x).chain(b.iter().copied()).collect();
    for c in expand_negated_disjunction(&nxb, &a) {
        push_live(&mut out, c, m);
    }
    Ok(out)
}

/// Total weight falsified by `value`; `None` if a hard clause is falsified.
pub fn multiset_cost<W: WeightValue>(clauses: &[WClause<W>], value: impl Fn(Lit) -> bool) -> Option<u128> {
    let mut total = 0u128;
    for c in clauses {
        if c.clause.is_satisfied_by(&value) {
            continue;
        }
        match c.weight {
            Weight::Top => return None,
            Weight::Finite(w) => total += w.to_u128().expect("unsigned weight fits u128"),
        }
    }
    Some(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProofStep {
    pub left: usize,
    pub right: usize,
    pub pivot: Var,
}

/// Leaves get ids `0..leaves.len()`; step `s` produces id `leaves.len() + s`.
#[derive(Debug, Clone)]
pub struct ResolutionProof<W> {
    leaves: Vec<WClause<W>>,
    steps: Vec<ProofStep>,
    resolvents: Vec<Clause>,
    used: Vec<usize>,
    hard: Vec<bool>,
    ror: Vec<bool>,
}

impl<W: WeightValue> ResolutionProof<W> {
    /// Builds and validates a proof: parents precede children and every
    /// step clashes on its pivot. Either parent may hold the positive side.
    pub fn new(leaves: Vec<WClause<W>>, steps: Vec<ProofStep>) -> Result<Self> {
        let n = leaves.len();
        let mut clauses: Vec<Clause> = leaves.iter().map(|c| c.clause.clone()).collect();
        let mut resolvents = Vec::with_capacity(steps.len());
        for (s, st) in steps.iter().enumerate() {
            let id = n + s;
            for p in [st.left, st.right] {
                if p >= id {
                    return Err(Error::UnknownProofId(p));
                }
            }
            let (l, r) = (&clauses[st.left], &clauses[st.right]);
            let (pos, neg) = if l.contains(st.pivot.pos()) && r.contains(st.pivot.neg()) {
                (l, r)
            } else if l.contains(st.pivot.neg()) && r.contains(st.pivot.pos()) {
                (r, l)
            } else {
                return Err(Error::NoClash { pivot: st.pivot.get() });
            };
            let a = residual(pos, st.pivot, true)?;
            let b = residual(neg, st.pivot, false)?;
            let c = Clause::new(a.into_iter().chain(b));
            clauses.push(c.clone());
            resolvents.push(c);
        }
        let total = n + steps.len();
        let mut used = vec![0usize; total];
        for st in &steps {
            used[st.left] += 1;
            used[st.right] += 1;
        }
        let mut hard = vec![false; total];
        let mut ror = vec![false; total];
        for id in 0..total {
            if id < n {
                hard[id] = leaves[id].weight.is_top();
                // An unused input never blocks read-once replay.
                ror[id] = hard[id] || used[id] <= 1;
            } else {
                let st = steps[id - n];
                hard[id] = hard[st.left] && hard[st.right];
                ror[id] = hard[id] || (used[id] <= 1 && ror[st.left] && ror[st.right]);
            }
        }
        Ok(ResolutionProof {
            leaves,
            steps,
            resolvents,
            used,
            hard,
            ror,
        })
    }

    pub fn leaves(&self) -> &[WClause<W>] {
        &self.leaves
    }

    pub fn steps(&self) -> &[ProofStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.leaves.len() + self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check(&self, id: usize) -> Result<()> {
        if id < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownProofId(id))
        }
    }

    pub fn clause(&self, id: usize) -> Result<&Clause> {
        self.check(id)?;
        Ok(if id < self.leaves.len() {
            &self.leaves[id].clause
        } else {
            &self.resolvents[id - self.leaves.len()]
        })
    }

    pub fn is_input(&self, id: usize) -> Result<bool> {
        self.check(id)?;
        Ok(id < self.leaves.len())
    }

    pub fn ancestors(&self, id: usize) -> Result<Option<(usize, usize)>> {
        self.check(id)?;
        Ok(id
            .checked_sub(self.leaves.len())
            .map(|s| (self.steps[s].left, self.steps[s].right)))
    }

    /// Number of steps consuming clause `id`.
    pub fn used(&self, id: usize) -> Result<usize> {
        self.check(id)?;
        Ok(self.used[id])
    }

    /// An input with weight Top, or a resolvent of two hard clauses.
    pub fn is_hard(&self, id: usize) -> Result<bool> {
        self.check(id)?;
        Ok(self.hard[id])
    }

    /// Hard, or derived without using any soft clause more than once.
    pub fn is_ror(&self, id: usize) -> Result<bool> {
        self.check(id)?;
        Ok(self.ror[id])
    }

    pub fn last_id(&self) -> Option<usize> {
        self.len().checked_sub(1)
    }

    /// The last resolvent is the empty clause.
    pub fn is_refutation(&self) -> bool {
        !self.steps.is_empty() && self.resolvents.last().is_some_and(Clause::is_empty)
    }

    /// One line per leaf and per step.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, l) in self.leaves.iter().enumerate() {
            writeln!(out, "{i} leaf {:?} w={}", l.clause, l.weight).expect("string write");
        }
        for (s, st) in self.steps.iter().enumerate() {
            let id = self.leaves.len() + s;
            writeln!(
                out,
                "{id} res {} {} on {} -> {:?}{}",
                st.left,
                st.right,
                st.pivot.get(),
                self.resolvents[s],
                if self.ror[id] { " ror" } else { "" }
            )
            .expect("string write");
        }
        out
    }
}

type Parents = (usize, usize, Var);

/// Searches for a resolution refutation of `core` by saturation, shortest
/// clauses first. Returns `None` if the budget runs out first or the
/// clauses are satisfiable.
pub fn get_proof<W: WeightValue>(core: &[WClause<W>], budget: usize) -> Option<ResolutionProof<W>> {
    // (clause, parents) for every clause generated so far
    let mut all: Vec<(Clause, Option<Parents>)> = Vec::new();
    let mut known: HashMap<Vec<Lit>, usize> = HashMap::new();
    let mut queue: BinaryHeap<Reverse<(usize, usize)>> = BinaryHeap::new();

    let mut empty_id = None;
    for wc in core {
        let id = all.len();
        all.push((wc.clause.clone(), None));
        if wc.clause.is_tautology() {
            continue;
        }
        let key = wc.clause.sorted_lits();
        if known.contains_key(&key) {
            continue;
        }
        known.insert(key, id);
        if wc.clause.is_empty() {
            empty_id = Some(id);
        }
        queue.push(Reverse((wc.clause.len(), id)));
    }

    let mut processed: Vec<usize> = Vec::new();
    let mut generated = 0usize;
    'outer: while empty_id.is_none() {
        let Some(Reverse((_, given))) = queue.pop() else {
            break;
        };
        for &other in &processed {
            let (g, o) = (&all[given].0, &all[other].0);
            let clashes: Vec<Lit> = g.lits().iter().copied().filter(|&l| o.contains(!l)).collect();
            if clashes.len() != 1 {
                continue;
            }
            let p = clashes[0];
            let r = Clause::new(
                g.lits()
                    .iter()
                    .copied()
                    .filter(|&l| l != p)
                    .chain(o.lits().iter().copied().filter(|&l| l != !p)),
            );
            let key = r.sorted_lits();
            if known.contains_key(&key) {
                continue;
            }
            generated += 1;
            if generated > budget {
                break 'outer;
            }
            let id = all.len();
            let empty = r.is_empty();
            queue.push(Reverse((r.len(), id)));
            all.push((r, Some((given, other, p.var()))));
            known.insert(key, id);
            if empty {
                empty_id = Some(id);
                break 'outer;
            }
        }
        processed.push(given);
    }

    let target = empty_id?;
    if target < core.len() {
        // An empty input clause needs no steps; report it as a one-leaf
        // "proof" only if someone asks for a refutation of it.
        return None;
    }
    // Collect the steps that lead to the empty clause, in id order.
    let mut needed = vec![false; all.len()];
    let mut stack = vec![target];
    while let Some(id) = stack.pop() {
        if needed[id] {
            continue;
        }
        needed[id] = true;
        if let Some((l, r, _)) = all[id].1 {
            stack.push(l);
            stack.push(r);
        }
    }
    let n = core.len();
    let mut new_id: HashMap<usize, usize> = (0..n).map(|i| (i, i)).collect();
    let mut steps = Vec::new();
    for id in n..all.len() {
        if !needed[id] {
            continue;
        }
        let (l, r, pivot) = all[id].1.expect("resolvent");
        steps.push(ProofStep {
            left: new_id[&l],
            right: new_id[&r],
            pivot,
        });
        new_id.insert(id, n + steps.len() - 1);
    }
    ResolutionProof::new(core.to_vec(), steps).ok()
}

/// Result of replaying the read-once steps of a proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadOnceReplay<W> {
    /// A read-once step produced the empty clause.
    pub derived_empty: bool,
    /// Core entries still present, with their current weights: untouched
    /// leaves (by leaf id) and non-empty read-once resolvents.
    pub remaining: Vec<(Option<usize>, WClause<W>)>,
    /// Posterior clashing clauses and compensation clauses produced.
    pub added: Vec<WClause<W>>,
    /// Number of steps replayed.
    pub applied: usize,
}

/// Replays every read-once step of `proof` with Max-RES moving `m` each
/// time. Soft clashing clauses are consumed (their remainder goes to
/// `added`); hard ones stay. Errors if a consumed clause lacks weight `m`,
/// which read-once proofs rule out.
pub fn replay_read_once<W: WeightValue>(proof: &ResolutionProof<W>, m: W) -> Result<ReadOnceReplay<W>> {
    let n = proof.leaves.len();
    let mw = Weight::Finite(m);
    let mut weight: Vec<Option<Weight<W>>> = proof.leaves.iter().map(|l| Some(l.weight)).collect();
    weight.resize(proof.len(), None);
    let mut alive = vec![true; proof.len()];
    let mut added = Vec::new();
    let mut derived_empty = false;
    let mut applied = 0;

    for (s, st) in proof.steps.iter().enumerate() {
        let id = n + s;
        if !proof.ror[id] {
            alive[id] = false;
            continue;
        }
        let (Some(wl), Some(wr)) = (weight[st.left], weight[st.right]) else {
            return Err(Error::InvalidInstance(format!(
                "read-once step {id} uses an underived clause"
            )));
        };
        for (p, w) in [(st.left, wl), (st.right, wr)] {
            if !alive[p] || w < mw {
                return Err(Error::InvalidInstance(format!(
                    "read-once step {id} needs clause {p} with weight {m}, found {w}"
                )));
            }
        }
        let lc = WClause::new(proof.clause(st.left)?.clone(), wl);
        let rc = WClause::new(proof.clause(st.right)?.clone(), wr);
        let (pos, neg) = if lc.clause.contains(st.pivot.pos()) {
            (lc, rc)
        } else {
            (rc, lc)
        };
        applied += 1;

        if pos.weight.is_top() && neg.weight.is_top() {
            weight[id] = Some(Weight::Top);
        } else {
            let out = max_res_amount(&pos, &neg, st.pivot, mw)?;
            // out[0] is the resolvent unless it was a tautology; the rest are
            // posterior and compensation clauses.
            let resolvent = proof.clause(id)?;
            let mut rest = Vec::new();
            let mut seen_resolvent = resolvent.is_tautology();
            for c in out {
                if !seen_resolvent && c.clause == *resolvent && c.weight == mw {
                    seen_resolvent = true;
                } else {
                    rest.push(c);
                }
            }
            for p in [st.left, st.right] {
                if !weight[p].expect("checked above").is_top() {
                    alive[p] = false;
                }
            }
            // posterior copies of hard parents are the parents themselves
            added.extend(rest.into_iter().filter(|c| !c.weight.is_top()));
            weight[id] = Some(mw);
        }
        if proof.clause(id)?.is_empty() {
            derived_empty = true;
            alive[id] = false;
        }
    }

    let mut remaining = Vec::new();
    for id in 0..proof.len() {
        if !alive[id] {
            continue;
        }
        let Some(w) = weight[id] else { continue };
        let leaf = (id < n).then_some(id);
        remaining.push((leaf, WClause::new(proof.clause(id)?.clone(), w)));
    }
    Ok(ReadOnceReplay {
        derived_empty,
        remaining,
        added,
        applied,
    })
}
