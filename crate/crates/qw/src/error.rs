use thiserror::Error;

/// Errors shared across the crate. Validation errors carry enough context to
/// name the offending constructor or equation in diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("signature has no constructors")]
    EmptySignature,

    #[error("duplicate constructor name `{0}`")]
    DuplicateName(String),

    #[error("constructor name `{0}` is not an identifier")]
    BadName(String),

    #[error("unknown constructor `{0}`")]
    UnknownConstructor(String),

    #[error("arity mismatch for `{ctor}`: expected {expected}, got {got}")]
    ArityMismatch {
        ctor: String,
        expected: usize,
        got: usize,
    },

    #[error("variable index {index} out of range for {vars} variables")]
    BadVariableIndex { index: usize, vars: usize },

    #[error("equation is not image preserving: left image {left:?} != right image {right:?}")]
    NotImagePreserving { left: Vec<usize>, right: Vec<usize> },

    #[error("equation #{index}: {source}")]
    InEquation {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("cap exceeded: {what} needs {needed}, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        needed: u64,
        cap: u64,
    },

    #[error("signature has no nullary constructor")]
    NoNullaryConstructor,

    #[error("algebra does not satisfy the equations: {0}")]
    NotSatisfying(String),

    #[error("no constructor arity admits a surjection onto a set of {0} elements")]
    NoConstructorFits(usize),

    #[error("rule set is not supported by the canonical-form engines (explicit or mixed rules)")]
    UnsupportedRuleSet,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
