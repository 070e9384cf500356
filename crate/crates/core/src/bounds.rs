//! Bound stepping over subset sums of soft-clause weights.
//!
//! A cost is always a sum of some soft weights, so a bound can jump straight
//! to the next value that a subset of the weights actually reaches.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::pb::{encode_pb_leq, EncodingContext, PbConstraint, Relation};
use crate::sat::SatSolver;
use crate::wcnf::{Lit, Var, WeightValue};

/// Largest `cap` handled with a dense bitset (bits).
pub const BITSET_LIMIT: i128 = 1 << 28;
/// Largest number of distinct sums kept by the sparse fallback.
pub const SPARSE_LIMIT: usize = 1 << 22;

/// A multiset of positive weights.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WeightSet {
    weights: Vec<i128>,
}

impl WeightSet {
    pub fn new<W: WeightValue>(weights: impl IntoIterator<Item = W>) -> Result<Self> {
        let weights = weights
            .into_iter()
            .map(|w| w.to_i128_checked())
            .collect::<Result<Vec<_>>>()?;
        if weights.iter().any(|&w| w <= 0) {
            return Err(Error::InvalidInstance("weights must be positive".into()));
        }
        Ok(WeightSet { weights })
    }

    pub fn from_i128(weights: Vec<i128>) -> Self {
        debug_assert!(weights.iter().all(|&w| w > 0));
        WeightSet { weights }
    }

    pub fn weights(&self) -> &[i128] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn sum(&self) -> i128 {
        self.weights.iter().sum()
    }

    pub fn max(&self) -> i128 {
        self.weights.iter().copied().max().unwrap_or(0)
    }

    /// All subset sums `≤ cap`, ascending; always contains 0.
    pub fn reachable_sums(&self, cap: i128) -> Result<Vec<i128>> {
        if cap < 0 {
            return Ok(Vec::new());
        }
        let cap = cap.min(self.sum());
        let n = self.weights.len();
        let sparse_is_cheaper = n < 40 && (1u128 << n) < (cap as u128 / 64).max(1);
        if cap <= BITSET_LIMIT && !sparse_is_cheaper {
            Ok(self.dense(cap as usize))
        } else {
            self.sparse(cap)
        }
    }

    fn dense(&self, cap: usize) -> Vec<i128> {
        let words = cap / 64 + 1;
        let mut bits = vec![0u64; words];
        bits[0] = 1;
        for &w in &self.weights {
            if w > cap as i128 {
                continue;
            }
            let w = w as usize;
            let (ws, bs) = (w / 64, w % 64);
            for i in (ws..words).rev() {
                let mut v = bits[i - ws] << bs;
                if bs > 0 && i > ws {
                    v |= bits[i - ws - 1] >> (64 - bs);
                }
                bits[i] |= v;
            }
        }
        let mut out = Vec::new();
        for (i, &word) in bits.iter().enumerate() {
            let mut word = word;
            while word != 0 {
                let b = word.trailing_zeros() as usize;
                let s = i * 64 + b;
                if s > cap {
                    break;
                }
                out.push(s as i128);
                word &= word - 1;
            }
        }
        out
    }

    fn sparse(&self, cap: i128) -> Result<Vec<i128>> {
        let mut sums: BTreeSet<i128> = BTreeSet::from([0]);
        for &w in &self.weights {
            let shifted: Vec<i128> = sums.iter().map(|s| s + w).take_while(|&s| s <= cap).collect();
            sums.extend(shifted);
            if sums.len() > SPARSE_LIMIT {
                return Err(Error::ResourceLimit(format!(
                    "more than {SPARSE_LIMIT} distinct subset sums below {cap}"
                )));
            }
        }
        Ok(sums.into_iter().collect())
    }

    /// Smallest reachable sum strictly above `k`; saturates at the total.
    ///
    /// Falls back to `k + 1` (still a sound step) if the sums cannot be
    /// enumerated within the resource limits.
    pub fn next_bound(&self, k: i128) -> i128 {
        let total = self.sum();
        if k >= total {
            return total;
        }
        // Some prefix of the weights lands in (k, k + max].
        let cap = total.min(k.max(0) + self.max());
        match self.reachable_sums(cap) {
            Ok(sums) => sums.into_iter().find(|&s| s > k).unwrap_or(total),
            Err(_) => k + 1,
        }
    }

    /// Largest reachable sum `≤ k` (falls back to `k` on resource limits).
    pub fn subset_sum_floor(&self, k: i128) -> i128 {
        if k < 0 {
            return 0;
        }
        match self.reachable_sums(k) {
            Ok(sums) => sums.last().copied().unwrap_or(0),
            Err(_) => k,
        }
    }
}

pub fn reachable_sums<W: WeightValue>(ws: &[W], cap: i128) -> Result<Vec<i128>> {
    WeightSet::new(ws.iter().copied())?.reachable_sums(cap)
}

pub fn next_bound<W: WeightValue>(ws: &[W], k: i128) -> Result<i128> {
    Ok(WeightSet::new(ws.iter().copied())?.next_bound(k))
}

pub fn subset_sum_floor<W: WeightValue>(ws: &[W], k: i128) -> Result<i128> {
    Ok(WeightSet::new(ws.iter().copied())?.subset_sum_floor(k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundKind {
    AtLeast,
    AtMost,
}

/// `Σ_{i ∈ indices} w_i·b_i ≥ k` or `≤ k` over blocking variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearBound {
    pub kind: BoundKind,
    pub indices: BTreeSet<usize>,
    pub k: i128,
}

impl LinearBound {
    pub fn at_least(indices: BTreeSet<usize>, k: i128) -> Self {
        LinearBound {
            kind: BoundKind::AtLeast,
            indices,
            k,
        }
    }

    pub fn at_most(indices: BTreeSet<usize>, k: i128) -> Self {
        LinearBound {
            kind: BoundKind::AtMost,
            indices,
            k,
        }
    }
}

/// Smallest reachable sum `k` of the cover's weights that exceeds the
/// summed at-most bounds of the sub-covers and for which the at-least
/// bounds inside the cover admit `Σ w_i·b_i = k`. Saturates at the total.
pub fn new_bound<W: WeightValue>(
    al: &[LinearBound],
    am: &[LinearBound],
    cover: &BTreeSet<usize>,
    weights: &[W],
) -> Result<i128> {
    let k0: i128 = am.iter().filter(|b| b.indices.is_subset(cover)).map(|b| b.k).sum();
    let idx: Vec<usize> = cover.iter().copied().collect();
    let ws = WeightSet::new(idx.iter().map(|&i| weights[i]))?;
    let total = ws.sum();
    if k0 >= total {
        return Ok(total);
    }

    // b_i for the j-th cover index is variable j+1.
    let var_of = |i: usize| -> Lit {
        let j = idx.binary_search(&i).expect("index inside cover");
        Var::from_index(j).pos()
    };
    let terms = |set: &BTreeSet<usize>| -> Vec<(W, Lit)> { set.iter().map(|&i| (weights[i], var_of(i))).collect() };

    let mut solver = SatSolver::new();
    let mut ctx = EncodingContext::new(idx.len() as u32 + 1);
    for b in al.iter().filter(|b| b.indices.is_subset(cover)) {
        let rel = match b.kind {
            BoundKind::AtLeast => Relation::Ge,
            BoundKind::AtMost => Relation::Le,
        };
        for c in PbConstraint::new(terms(&b.indices), rel, b.k)? {
            let enc = encode_pb_leq(&c, &mut ctx)?;
            for cl in &enc.clauses {
                solver.add_clause_ref(cl);
            }
            solver.add_clause(&[enc.root]);
        }
    }

    let mut k = k0;
    loop {
        k = ws.next_bound(k);
        if k >= total {
            return Ok(total);
        }
        let mut roots = Vec::new();
        for c in PbConstraint::new(terms(cover), Relation::Eq, k)? {
            let enc = encode_pb_leq(&c, &mut ctx)?;
            for cl in &enc.clauses {
                solver.add_clause_ref(cl);
            }
            roots.push(enc.root);
        }
        if solver.solve_with_assumptions(&roots).is_sat() {
            return Ok(k);
        }
    }
}
