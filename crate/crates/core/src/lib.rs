pub mod bounds;
pub mod error;
pub mod gen;
pub mod maxres;
pub mod pb;
pub mod sat;
pub mod solvers;
pub mod wcnf;

pub use error::{Error, ParseError, Result};
pub use solvers::{solve, Algorithm, BoundStep, SolveReport, SolveStatus, SolverConfig};
pub use wcnf::{Assignment, Clause, Cost, Lit, SoftClause, Var, WcnfInstance, Weight, WeightValue};

pub type Instance = WcnfInstance<u64>;
