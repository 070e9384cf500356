use std::collections::HashMap;

use crate::wcnf::{Lit, WeightValue};

use super::session::Session;

/// One blocking variable per soft clause, created up front but only
/// released once the clause shows up in a core: until then `¬b_i` is
/// assumed, which also makes the clause visible in failed-assumption cores.
pub(super) struct Lazy {
    pub b: Vec<Option<Lit>>,
    pub relaxed: Vec<bool>,
    guard: HashMap<Lit, usize>,
}

impl Lazy {
    pub fn new<W: WeightValue>(s: &mut Session<W>) -> Self {
        let mut b = Vec::new();
        let mut guard = HashMap::new();
        for i in 0..s.inst.soft().len() {
            let c = &s.inst.soft()[i].clause;
            if c.is_tautology() {
                b.push(None);
                continue;
            }
            let c = c.clone();
            let v = s.fresh().pos();
            s.add_hard(c.with_lit(v));
            guard.insert(!v, i);
            b.push(Some(v));
        }
        let relaxed = vec![false; b.len()];
        Lazy { b, relaxed, guard }
    }

    pub fn assumptions(&self) -> Vec<Lit> {
        self.b
            .iter()
            .zip(&self.relaxed)
            .filter_map(|(b, &r)| match b {
                Some(b) if !r => Some(!*b),
                _ => None,
            })
            .collect()
    }

    /// Unrelaxed soft clauses among the failed assumptions, ascending.
    pub fn unrelaxed_in(&self, failed: &[Lit]) -> Vec<usize> {
        let mut out: Vec<usize> = failed
            .iter()
            .filter_map(|l| self.guard.get(l).copied())
            .filter(|&i| !self.relaxed[i])
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn relax<W: WeightValue>(&mut self, s: &mut Session<W>, idx: &[usize]) {
        for &i in idx {
            debug_assert!(!self.relaxed[i], "soft clause {i} relaxed twice");
            self.relaxed[i] = true;
            s.count_blocking(i);
        }
    }

    pub fn relaxed_set(&self) -> Vec<usize> {
        (0..self.relaxed.len()).filter(|&i| self.relaxed[i]).collect()
    }
}
