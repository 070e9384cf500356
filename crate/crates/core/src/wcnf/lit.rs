use std::fmt;
use std::ops::Not;

/// A propositional variable, numbered from 1 as in DIMACS.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    /// # Panics
    /// If `n` is zero.
    pub fn new(n: u32) -> Self {
        assert!(n >= 1, "variables are numbered from 1");
        Var(n)
    }

    pub fn from_index(idx: usize) -> Self {
        Var(idx as u32 + 1)
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Zero-based index, for dense per-variable tables.
    pub fn index(self) -> usize {
        (self.0 - 1) as usize
    }

    pub fn pos(self) -> Lit {
        Lit::new(self, true)
    }

    // Pairs with `pos`; a `Var` has no negation of its own.
    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit::new(self, false)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A literal, packed as `2 * var_index + negated`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, positive: bool) -> Self {
        Lit(((var.0 - 1) << 1) | u32::from(!positive))
    }

    /// # Panics
    /// If `v` is zero.
    pub fn from_dimacs(v: i32) -> Self {
        assert!(v != 0, "0 is not a literal");
        Lit::new(Var(v.unsigned_abs()), v > 0)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var().0);
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub fn var(self) -> Var {
        Var((self.0 >> 1) + 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Dense index over both polarities.
    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn from_code(code: usize) -> Self {
        Lit(code as u32)
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A disjunction of literals.
///
/// Construction keeps the caller's literal order but drops repeated
/// literals, so a normalized clause never contains the same literal twice.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Self {
        let mut out: Vec<Lit> = Vec::new();
        for l in lits {
            if !out.contains(&l) {
                out.push(l);
            }
        }
        Clause { lits: out }
    }

    pub fn from_dimacs(lits: &[i32]) -> Self {
        Clause::new(lits.iter().map(|&v| Lit::from_dimacs(v)))
    }

    pub fn empty() -> Self {
        Clause { lits: Vec::new() }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, l: Lit) -> bool {
        self.lits.contains(&l)
    }

    /// True when the clause holds some literal together with its negation.
    pub fn is_tautology(&self) -> bool {
        self.lits.iter().any(|&l| self.lits.contains(&!l))
    }

    pub fn max_var(&self) -> u32 {
        self.lits.iter().map(|l| l.var().get()).max().unwrap_or(0)
    }

    /// Copy of this clause with `extra` appended (if not already present).
    pub fn with_lit(&self, extra: Lit) -> Clause {
        let mut lits = self.lits.clone();
        if !lits.contains(&extra) {
            lits.push(extra);
        }
        Clause { lits }
    }

    /// Literals in sorted order, for set-style comparisons.
    pub fn sorted_lits(&self) -> Vec<Lit> {
        let mut v = self.lits.clone();
        v.sort_unstable();
        v
    }

    pub fn is_satisfied_by(&self, value: impl Fn(Lit) -> bool) -> bool {
        self.lits.iter().any(|&l| value(l))
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

impl FromIterator<Lit> for Clause {
    fn from_iter<I: IntoIterator<Item = Lit>>(iter: I) -> Self {
        Clause::new(iter)
    }
}
