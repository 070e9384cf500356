use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Reasons a WCNF document is rejected. Every variant carries the 1-based
/// line number where the problem was found.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: clause found before the `p wcnf` header")]
    MissingHeader { line: usize },
    #[error("line {line}: duplicate `p` header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: invalid token `{token}`")]
    InvalidToken { line: usize, token: String },
    #[error("line {line}: literal {lit} is out of range (num_vars = {num_vars})")]
    LiteralOutOfRange { line: usize, lit: i64, num_vars: u32 },
    #[error("line {line}: clause weight must be positive")]
    NonPositiveWeight { line: usize },
    #[error("line {line}: clause weight exceeds top")]
    WeightAboveTop { line: usize },
    #[error("line {line}: clause is missing its terminating 0")]
    MissingTerminator { line: usize },
    #[error("line {line}: no `p wcnf` header found")]
    NoHeader { line: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("weight arithmetic overflowed")]
    WeightOverflow,
    #[error("cannot subtract weight {subtrahend} from smaller weight {minuend}")]
    WeightUnderflow { minuend: String, subtrahend: String },
    #[error("assignment covers {got} variables but the instance has {expected}")]
    PartialAssignment { expected: u32, got: usize },
    #[error("instance has {num_vars} variables, above the enumeration limit {limit}")]
    OracleLimit { num_vars: u32, limit: u32 },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("exactly-one constraint over an empty literal set")]
    EmptyExactlyOne,
    #[error("invalid pseudo-Boolean constraint: {0}")]
    InvalidConstraint(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("pivot variable {pivot} does not clash between the two clauses")]
    NoClash { pivot: u32 },
    #[error("unknown proof clause id {0}")]
    UnknownProofId(usize),
    #[error("outcome is satisfiable; no core to extract")]
    NotUnsat,
    #[error("{0}")]
    Unsupported(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}
