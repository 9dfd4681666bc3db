use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("unknown factor label `{0}`")]
    UnknownFactor(String),

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("truncation risk: {0}")]
    Truncation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular detuning: {0}")]
    SingularDetuning(String),

    #[error("adiabaticity violated: {0}")]
    Adiabaticity(String),

    #[error("degenerate steady state: {0}")]
    DegenerateSteadyState(String),

    #[error("stiffness: {0}")]
    Stiffness(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("invalid options: {0}")]
    InvalidOptions(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
