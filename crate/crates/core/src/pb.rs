//! Pseudo-Boolean constraints `Σ a_i·l_i ≤ K` and their CNF translation.
//!
//! Node `D_{i,b}` stands for "the first `i` terms sum to at most `b`". A node
//! is expanded into `D_{i-1,b}` and `D_{i-1,b-a_i}`; nodes with the same
//! `(i, b)` are shared, and nodes whose value is fixed by their bound are not
//! expanded at all.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::wcnf::{Clause, Lit, Var, WeightValue};

/// Default cap on the number of `D` nodes one encoding may create.
pub const DEFAULT_NODE_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
}

/// A constraint in canonical form: `Σ a_i·l_i ≤ bound`, coefficients
/// positive and sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PbConstraint<W> {
    terms: Vec<(W, Lit)>,
    bound: i128,
}

impl<W: WeightValue> PbConstraint<W> {
    pub fn leq(terms: Vec<(W, Lit)>, bound: i128) -> Result<Self> {
        if terms.iter().any(|(a, _)| a.is_zero()) {
            return Err(Error::InvalidConstraint("coefficients must be positive".into()));
        }
        let mut terms = terms;
        terms.sort_by_key(|t| t.0);
        Ok(PbConstraint { terms, bound })
    }

    /// Normalizes any relation into one or two `≤` constraints.
    pub fn new(terms: Vec<(W, Lit)>, rel: Relation, bound: i128) -> Result<Vec<Self>> {
        let flipped = |terms: &[(W, Lit)]| terms.iter().map(|&(a, l)| (a, !l)).collect::<Vec<_>>();
        let total = terms
            .iter()
            .try_fold(0i128, |acc, (a, _)| acc.checked_add(a.to_i128_checked().ok()?))
            .ok_or(Error::WeightOverflow)?;
        // Σ a·l ≥ K  ⇔  Σ a·¬l ≤ Σa − K
        let ge = |k: i128| PbConstraint::leq(flipped(&terms), total - k);
        Ok(match rel {
            Relation::Le => vec![PbConstraint::leq(terms, bound)?],
            Relation::Lt => vec![PbConstraint::leq(terms, bound - 1)?],
            Relation::Ge => vec![ge(bound)?],
            Relation::Gt => vec![ge(bound + 1)?],
            Relation::Eq => vec![ge(bound)?, PbConstraint::leq(terms, bound)?],
        })
    }

    pub fn terms(&self) -> &[(W, Lit)] {
        &self.terms
    }

    pub fn bound(&self) -> i128 {
        self.bound
    }

    pub fn coefficient_sum(&self) -> i128 {
        self.terms.iter().map(|(a, _)| coef(*a)).sum()
    }

    /// Evaluates the left-hand side under `value`.
    pub fn lhs(&self, value: impl Fn(Lit) -> bool) -> i128 {
        self.terms
            .iter()
            .filter(|(_, l)| value(*l))
            .map(|(a, _)| coef(*a))
            .sum()
    }

    pub fn is_satisfied_by(&self, value: impl Fn(Lit) -> bool) -> bool {
        self.lhs(value) <= self.bound
    }

    fn max_var(&self) -> u32 {
        self.terms.iter().map(|(_, l)| l.var().get()).max().unwrap_or(0)
    }
}

fn coef<W: WeightValue>(a: W) -> i128 {
    // WeightValue types are at most 128 bits wide and the encoder rejects
    // sums that leave i128, so this cannot truncate for u64 and below.
    a.to_i128_checked().unwrap_or(i128::MAX)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SizeProfile {
    pub variables: usize,
    pub clauses: usize,
    pub cuts: usize,
    pub merges: usize,
}

impl std::ops::AddAssign for SizeProfile {
    fn add_assign(&mut self, o: SizeProfile) {
        self.variables += o.variables;
        self.clauses += o.clauses;
        self.cuts += o.cuts;
        self.merges += o.merges;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    /// `b < 0`: no assignment fits.
    False,
    /// The whole prefix fits under `b`.
    True,
    /// `b = 0`: every prefix literal must be false.
    Zero,
    Inner,
}

/// Classifies `D_{i,b}` given the prefix sum `Σ_{j≤i} a_j`.
pub fn node_kind(prefix_sum: i128, b: i128) -> NodeKind {
    if b < 0 {
        NodeKind::False
    } else if prefix_sum <= b {
        NodeKind::True
    } else if b == 0 {
        NodeKind::Zero
    } else {
        NodeKind::Inner
    }
}

/// Hands out fresh variables for encodings and keeps running totals.
#[derive(Debug, Clone)]
pub struct EncodingContext {
    next_var: u32,
    node_limit: usize,
    totals: SizeProfile,
}

impl EncodingContext {
    /// Fresh variables start at `first_free`.
    pub fn new(first_free: u32) -> Self {
        EncodingContext {
            next_var: first_free.max(1),
            node_limit: DEFAULT_NODE_LIMIT,
            totals: SizeProfile::default(),
        }
    }

    pub fn with_node_limit(mut self, limit: usize) -> Self {
        self.node_limit = limit;
        self
    }

    pub fn fresh(&mut self) -> Var {
        let v = Var::new(self.next_var);
        self.next_var += 1;
        v
    }

    /// Highest variable handed out so far (0 if none).
    pub fn max_var(&self) -> u32 {
        self.next_var - 1
    }

    /// Skips past variables allocated elsewhere.
    pub fn bump_to(&mut self, first_free: u32) {
        self.next_var = self.next_var.max(first_free);
    }

    pub fn totals(&self) -> SizeProfile {
        self.totals
    }
}

#[derive(Debug, Clone)]
pub struct PbEncoding {
    pub root: Lit,
    pub clauses: Vec<Clause>,
    pub profile: SizeProfile,
    /// `(var, i, b)` for every node, in creation order.
    pub nodes: Vec<(Var, usize, i128)>,
}

impl PbEncoding {
    /// DIMACS text with a comment naming each `D_{i,b}` variable.
    pub fn debug_dump(&self) -> String {
        let mut out = String::new();
        for (v, i, b) in &self.nodes {
            writeln!(out, "c {} = D_{{{},{}}}", v.get(), i, b).expect("string write");
        }
        writeln!(out, "c root {}", self.root).expect("string write");
        let max_var = self
            .clauses
            .iter()
            .map(Clause::max_var)
            .max()
            .unwrap_or(0)
            .max(self.root.var().get());
        writeln!(out, "p cnf {} {}", max_var, self.clauses.len()).expect("string write");
        for c in &self.clauses {
            for l in c.lits() {
                write!(out, "{l} ").expect("string write");
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Encodes `c`; asserting the returned root enforces the constraint.
pub fn encode_pb_leq<W: WeightValue>(c: &PbConstraint<W>, ctx: &mut EncodingContext) -> Result<PbEncoding> {
    ctx.bump_to(c.max_var() + 1);
    let n = c.terms.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0i128);
    for (a, _) in &c.terms {
        let a = a.to_i128_checked()?;
        let next = prefix.last().copied().unwrap_or(0i128).checked_add(a);
        prefix.push(next.ok_or(Error::WeightOverflow)?);
    }

    let mut map: HashMap<(usize, i128), Var> = HashMap::new();
    let mut nodes = Vec::new();
    let mut clauses = Vec::new();
    let mut profile = SizeProfile::default();
    let mut stack: Vec<(usize, i128)> = Vec::new();

    let root_var = ctx.fresh();
    map.insert((n, c.bound), root_var);
    nodes.push((root_var, n, c.bound));
    stack.push((n, c.bound));

    while let Some((i, b)) = stack.pop() {
        let d = map[&(i, b)];
        match node_kind(prefix[i], b) {
            NodeKind::False => clauses.push(Clause::new([d.neg()])),
            NodeKind::True => clauses.push(Clause::new([d.pos()])),
            NodeKind::Zero => {
                // D ⇔ all of l_1..l_i are false
                let mut all = Vec::with_capacity(i + 1);
                for &(_, l) in &c.terms[..i] {
                    clauses.push(Clause::new([d.neg(), !l]));
                    all.push(l);
                }
                all.push(d.pos());
                clauses.push(Clause::new(all));
            }
            NodeKind::Inner => {
                let (a, l) = c.terms[i - 1];
                let a = coef(a);
                let mut child = |key: (usize, i128)| -> Result<Var> {
                    if node_kind(prefix[key.0], key.1) != NodeKind::Inner {
                        profile.cuts += 1;
                    }
                    if let Some(&v) = map.get(&key) {
                        profile.merges += 1;
                        return Ok(v);
                    }
                    if map.len() >= ctx.node_limit {
                        return Err(Error::ResourceLimit(format!(
                            "pseudo-Boolean encoding exceeds {} nodes",
                            ctx.node_limit
                        )));
                    }
                    let v = ctx.fresh();
                    map.insert(key, v);
                    nodes.push((v, key.0, key.1));
                    stack.push(key);
                    Ok(v)
                };
                let x = child((i - 1, b))?;
                let y = child((i - 1, b - a))?;
                // D ⇔ X ∧ (¬l ∨ Y), using Y → X
                clauses.push(Clause::new([y.neg(), d.pos()]));
                clauses.push(Clause::new([x.neg(), l, d.pos()]));
                clauses.push(Clause::new([d.neg(), x.pos()]));
                clauses.push(Clause::new([d.neg(), !l, y.pos()]));
            }
        }
    }

    profile.variables = map.len();
    profile.clauses = clauses.len();
    ctx.totals += profile;
    Ok(PbEncoding {
        root: root_var.pos(),
        clauses,
        profile,
        nodes,
    })
}

/// Counters for encoding `c` without keeping the clauses.
pub fn encoding_size_profile<W: WeightValue>(c: &PbConstraint<W>) -> Result<SizeProfile> {
    let mut ctx = EncodingContext::new(c.max_var() + 1);
    Ok(encode_pb_leq(c, &mut ctx)?.profile)
}

/// Pairwise exactly-one: one at-least-one clause plus all `(¬b_i ∨ ¬b_j)`.
pub fn encode_exactly_one(bs: &[Lit]) -> Result<Vec<Clause>> {
    if bs.is_empty() {
        return Err(Error::EmptyExactlyOne);
    }
    let mut out = vec![Clause::new(bs.iter().copied())];
    for i in 0..bs.len() {
        for j in i + 1..bs.len() {
            out.push(Clause::new([!bs[i], !bs[j]]));
        }
    }
    Ok(out)
}
