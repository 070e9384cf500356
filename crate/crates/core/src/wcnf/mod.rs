//! Weighted partial MaxSAT instances, WCNF input/output and assignment
//! evaluation.
//!
//! Soft clauses keep their input position: duplicate clauses are not merged,
//! because core bookkeeping in several algorithms refers to clauses by index.

mod lit;
mod parse;
mod weight;

pub use lit::{Clause, Lit, Var};
pub use parse::{parse_wcnf, parse_wcnf_with_warnings, write_wcnf, ParseWarning};
pub use weight::{Cost, Weight, WeightValue};

use crate::error::{Error, Result};

/// Default variable limit for [`brute_force_optimum`].
pub const DEFAULT_ORACLE_LIMIT: u32 = 22;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SoftClause<W> {
    pub clause: Clause,
    pub weight: W,
}

/// Hard clauses plus weighted soft clauses over variables `1..=num_vars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WcnfInstance<W> {
    num_vars: u32,
    hard: Vec<Clause>,
    soft: Vec<SoftClause<W>>,
    soft_weight_sum: W,
}

impl<W: WeightValue> WcnfInstance<W> {
    /// Validates variable ranges and weights, and caches the soft weight sum.
    pub fn new(num_vars: u32, hard: Vec<Clause>, soft: Vec<SoftClause<W>>) -> Result<Self> {
        for c in hard.iter().chain(soft.iter().map(|s| &s.clause)) {
            if c.max_var() > num_vars {
                return Err(Error::InvalidInstance(format!(
                    "clause {c:?} mentions a variable above {num_vars}"
                )));
            }
        }
        if soft.iter().any(|s| s.weight.is_zero()) {
            return Err(Error::InvalidInstance("soft weights must be at least 1".into()));
        }
        let soft_weight_sum = W::sum_checked(soft.iter().map(|s| s.weight))?;
        Ok(WcnfInstance {
            num_vars,
            hard,
            soft,
            soft_weight_sum,
        })
    }

    /// Builds an instance from DIMACS-style integer clauses; `num_vars` is
    /// taken as the largest variable mentioned.
    pub fn from_dimacs(hard: &[&[i32]], soft: &[(&[i32], W)]) -> Result<Self> {
        let hard: Vec<Clause> = hard.iter().map(|c| Clause::from_dimacs(c)).collect();
        let soft: Vec<SoftClause<W>> = soft
            .iter()
            .map(|(c, w)| SoftClause {
                clause: Clause::from_dimacs(c),
                weight: *w,
            })
            .collect();
        let num_vars = hard
            .iter()
            .chain(soft.iter().map(|s| &s.clause))
            .map(Clause::max_var)
            .max()
            .unwrap_or(0);
        Self::new(num_vars, hard, soft)
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn hard(&self) -> &[Clause] {
        &self.hard
    }

    pub fn soft(&self) -> &[SoftClause<W>] {
        &self.soft
    }

    pub fn soft_weight_sum(&self) -> W {
        self.soft_weight_sum
    }

    pub fn has_empty_hard(&self) -> bool {
        self.hard.iter().any(Clause::is_empty)
    }

    /// True when every soft clause has weight 1.
    pub fn is_unweighted(&self) -> bool {
        self.soft.iter().all(|s| s.weight.is_one())
    }

    /// Same clauses with every soft weight replaced by 1.
    pub fn with_unit_weights(&self) -> Self {
        let soft: Vec<_> = self
            .soft
            .iter()
            .map(|s| SoftClause {
                clause: s.clause.clone(),
                weight: W::one(),
            })
            .collect();
        WcnfInstance {
            num_vars: self.num_vars,
            hard: self.hard.clone(),
            soft_weight_sum: W::from(soft.len()).expect("clause count fits the weight type"),
            soft,
        }
    }

    /// Weighted clauses in soft-then-hard order, hard ones marked `Top`.
    pub fn weighted_clauses(&self) -> impl Iterator<Item = (&Clause, Weight<W>)> {
        self.soft
            .iter()
            .map(|s| (&s.clause, Weight::Finite(s.weight)))
            .chain(self.hard.iter().map(|c| (c, Weight::Top)))
    }
}

/// A total truth assignment over `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    /// Assignment over `n` variables from the low bits of `mask`
    /// (bit `i` is variable `i + 1`).
    pub fn from_mask(n: u32, mask: u64) -> Self {
        Assignment {
            values: (0..n).map(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn var_value(&self, v: Var) -> bool {
        self.values[v.index()]
    }

    pub fn lit_value(&self, l: Lit) -> bool {
        self.values[l.var().index()] == l.is_positive()
    }

    pub fn satisfies(&self, c: &Clause) -> bool {
        c.is_satisfied_by(|l| self.lit_value(l))
    }

    /// Prefix of the assignment covering the first `n` variables.
    pub fn truncated(&self, n: u32) -> Assignment {
        Assignment {
            values: self.values[..n as usize].to_vec(),
        }
    }

    /// Literals as signed DIMACS integers, one per variable.
    pub fn dimacs_lits(&self) -> impl Iterator<Item = i64> + '_ {
        self.values.iter().enumerate().map(|(i, &b)| {
            let v = i as i64 + 1;
            if b {
                v
            } else {
                -v
            }
        })
    }
}

/// Sum of the weights of falsified soft clauses, or `Infeasible` when a hard
/// clause is falsified.
pub fn cost_of<W: WeightValue>(instance: &WcnfInstance<W>, a: &Assignment) -> Result<Cost<W>> {
    if a.len() < instance.num_vars as usize {
        return Err(Error::PartialAssignment {
            expected: instance.num_vars,
            got: a.len(),
        });
    }
    if instance.hard.iter().any(|c| !a.satisfies(c)) {
        return Ok(Cost::Infeasible);
    }
    let falsified = instance
        .soft
        .iter()
        .filter(|s| !a.satisfies(&s.clause))
        .map(|s| s.weight);
    Ok(Cost::Feasible(W::sum_checked(falsified)?))
}

struct MaskClause {
    pos: u64,
    neg: u64,
}

impl MaskClause {
    fn new(c: &Clause) -> Self {
        let (mut pos, mut neg) = (0u64, 0u64);
        for l in c.lits() {
            let bit = 1u64 << l.var().index();
            if l.is_positive() {
                pos |= bit;
            } else {
                neg |= bit;
            }
        }
        MaskClause { pos, neg }
    }

    #[inline]
    fn sat(&self, mask: u64) -> bool {
        mask & self.pos != 0 || !mask & self.neg != 0
    }
}

/// Exhaustive optimum over all `2^n` assignments; the reference oracle for
/// every solver. Returns the minimal cost and one witness, or `Infeasible`
/// with no witness when the hard clauses are unsatisfiable.
pub fn brute_force_optimum<W: WeightValue>(
    instance: &WcnfInstance<W>,
    limit: u32,
) -> Result<(Cost<W>, Option<Assignment>)> {
    let n = instance.num_vars;
    if n > limit || n > 40 {
        return Err(Error::OracleLimit { num_vars: n, limit });
    }
    let hard: Vec<MaskClause> = instance.hard.iter().map(MaskClause::new).collect();
    let soft: Vec<(MaskClause, W)> = instance
        .soft
        .iter()
        .map(|s| (MaskClause::new(&s.clause), s.weight))
        .collect();
    let mut best: Option<(W, u64)> = None;
    'outer: for mask in 0..(1u64 << n) {
        if !hard.iter().all(|c| c.sat(mask)) {
            continue;
        }
        let mut cost = W::zero();
        for (c, w) in &soft {
            if !c.sat(mask) {
                // bounded by the cached soft sum, so this cannot overflow
                cost = cost + *w;
                if matches!(best, Some((b, _)) if cost >= b) {
                    continue 'outer;
                }
            }
        }
        best = Some((cost, mask));
        if cost.is_zero() {
            break;
        }
    }
    Ok(match best {
        Some((cost, mask)) => (Cost::Feasible(cost), Some(Assignment::from_mask(n, mask))),
        None => (Cost::Infeasible, None),
    })
}
