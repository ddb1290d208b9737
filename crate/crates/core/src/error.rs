use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("elements belong to different time-symbol registries ({0} vs {1})")]
    RegistryMismatch(u64, u64),

    #[error("unknown time symbol `{0}`")]
    UnknownSymbol(String),

    #[error(
        "non-generic parameters: exact equality is refused when b/a is not treated as irrational"
    )]
    NonGeneric,

    #[error("exact arithmetic requires rational parameters (use a Pythagorean pair)")]
    NotExact,

    #[error("window of dimension {dim} exceeds the dense budget of {budget}")]
    WindowTooLarge { dim: usize, budget: usize },

    #[error("degenerate probe family: {0}")]
    DegenerateProbe(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("operator is not scalar on the fiber at ({k},{l})")]
    NotScalar { k: i64, l: i64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
