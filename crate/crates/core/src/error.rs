use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown variable `{name}` at byte {offset}")]
    UnknownVariable { name: String, offset: usize },

    #[error("non-integer exponent at byte {offset}")]
    NonIntegerExponent { offset: usize },

    #[error("function `{name}` at byte {offset} is only allowed in initial-data expressions")]
    TranscendentalNotAllowed { name: String, offset: usize },

    #[error("expression is not a rational function of its variables")]
    NotRational,

    #[error("division by zero")]
    DivisionByZero,

    #[error("variable with index {0} has no assigned value")]
    UnassignedVariable(usize),

    #[error("could not find a non-singular probe point after {0} attempts")]
    ProbeExhausted(usize),

    #[error("expression exceeds the size guard ({terms} monomials > {limit})")]
    ExpressionTooLarge { terms: usize, limit: usize },

    #[error("metric is identically degenerate")]
    DegenerateMetric,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("at most one of the constants a^1..a^N, K may vanish ({0} do)")]
    TooManyZeroConstants(usize),

    #[error("not a closed form: {0}")]
    NotClosed(String),

    #[error("path integral leaves the polynomial class: {0}")]
    Unsupported(String),

    #[error("inconsistent results: {0}")]
    Inconsistency(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("invalid input: {0}")]
    Input(String),
}
