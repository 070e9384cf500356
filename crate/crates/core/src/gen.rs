//! Uniform random WPMax2SAT / WPMax3SAT instances.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::wcnf::{Clause, Lit, SoftClause, Var, WcnfInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    WpMax2Sat,
    WpMax3Sat,
}

impl Family {
    pub fn width(self) -> usize {
        match self {
            Family::WpMax2Sat => 2,
            Family::WpMax3Sat => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::WpMax2Sat => "wpmax2sat",
            Family::WpMax3Sat => "wpmax3sat",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wpmax2sat" => Ok(Family::WpMax2Sat),
            "wpmax3sat" => Ok(Family::WpMax3Sat),
            _ => Err(Error::InvalidConfig(format!(
                "unknown family `{s}` (expected wpmax2sat or wpmax3sat)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub family: Family,
    pub vars: u32,
    pub clauses: usize,
    pub min_weight: u64,
    pub max_weight: u64,
    /// Probability that a clause is hard.
    pub hard_fraction: f64,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(family: Family, vars: u32, clauses: usize) -> Self {
        GenSpec {
            family,
            vars,
            clauses,
            min_weight: 1,
            max_weight: 20,
            hard_fraction: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.family.width() > self.vars as usize {
            return Err(Error::InvalidConfig(format!(
                "clause width {} exceeds the {} available variables",
                self.family.width(),
                self.vars
            )));
        }
        if self.min_weight == 0 || self.min_weight > self.max_weight {
            return Err(Error::InvalidConfig(format!(
                "weight range {}..={} must be non-empty and positive",
                self.min_weight, self.max_weight
            )));
        }
        if !(0.0..=1.0).contains(&self.hard_fraction) {
            return Err(Error::InvalidConfig(format!(
                "hard fraction {} outside [0, 1]",
                self.hard_fraction
            )));
        }
        Ok(())
    }

    /// The `index`-th instance of the family; each index has its own stream.
    pub fn instance(&self, index: u64) -> Result<WcnfInstance<u64>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let mut hard = Vec::new();
        let mut soft = Vec::new();
        for _ in 0..self.clauses {
            let vars = sample(&mut rng, self.vars as usize, self.family.width());
            let clause = Clause::new(vars.iter().map(|v| Lit::new(Var::from_index(v), rng.gen())));
            if rng.gen_bool(self.hard_fraction) {
                hard.push(clause);
            } else {
                soft.push(SoftClause {
                    clause,
                    weight: rng.gen_range(self.min_weight..=self.max_weight),
                });
            }
        }
        WcnfInstance::new(self.vars, hard, soft)
    }

    pub fn instances(&self, count: u64) -> Result<Vec<WcnfInstance<u64>>> {
        (0..count).map(|i| self.instance(i)).collect()
    }
}
