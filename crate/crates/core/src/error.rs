use thiserror::Error;

/// Errors raised by constructors and diagnostics.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabError {
    /// Malformed input: reversed or out-of-range endpoints, overlapping atoms, bad lengths.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A textual value (dyadic, rational, scenario file) failed to parse.
    #[error("parse error: {0}")]
    Parse(String),

    /// An operator was called with the wrong number of operands.
    #[error("operator `{op}` expects {expected} operand(s)")]
    Arity { op: &'static str, expected: usize },

    /// A documented size cap was exceeded.
    #[error("{what} cap exceeded: {actual} > {limit}")]
    CapExceeded {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    /// A horizon past the last index a sequence can produce.
    #[error("horizon {requested} exceeds max horizon {max}")]
    Horizon { requested: usize, max: usize },

    /// Unknown name in the builtin sequence registry.
    #[error("unknown builtin sequence `{0}`")]
    UnknownBuiltin(String),

    /// An identity that must hold by construction did not.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> LabError {
    LabError::Invalid(msg.into())
}

pub(crate) fn invariant(msg: impl Into<String>) -> LabError {
    LabError::Invariant(msg.into())
}
