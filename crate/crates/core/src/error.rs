use thiserror::Error;

/// Crate-wide error type. Every fallible operation returns one of these;
/// `DeadlineExceeded` is always distinct from a negative answer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed structure: {}", issues.join("; "))]
    MalformedStructure { issues: Vec<String> },

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("bad parameter: {0}")]
    BadParam(String),

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("map not total or out of range: {0}")]
    ArityOrRangeMismatch(String),

    #[error("size cap exceeded: {what} needs {requested}, cap is {cap}")]
    SizeCapExceeded {
        what: &'static str,
        requested: u128,
        cap: u128,
    },

    #[error("deadline exceeded")]
    DeadlineExceeded,

    #[error("arity mismatch: {0}")]
    ArityMismatch(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("bad arity: {0}")]
    BadArity(String),

    #[error("table is not cyclic: {0}")]
    NotCyclic(String),

    #[error("table does not satisfy the area-rare identity: {0}")]
    NotAreaRare(String),

    #[error("not a homomorphism: {0}")]
    NotAHomomorphism(String),

    #[error("a cyclic polymorphism of arity {0} exists, so the extraction guarantee is void")]
    CyclicPolymorphismExists(usize),

    #[error("undeclared variable: {0}")]
    UndeclaredVariable(String),

    #[error("chain space cap exceeded: {chains} chains, cap is {cap}")]
    ChainSpaceCapExceeded { chains: u128, cap: u128 },

    #[error("bad input: {0}")]
    BadInput(String),

    #[error("value too large: {0}")]
    ValueTooLarge(String),

    #[error("fragment too large: {0}")]
    FragmentTooLarge(String),

    #[error("minor link violated: {0}")]
    MinorLinkViolation(String),

    #[error("no entry for a table reached by the reduction: {0}")]
    MissingXiEntry(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
