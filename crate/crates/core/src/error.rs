use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("singular normal equations: B does not have full column rank")]
    SingularNormalEquations,

    #[error("singular linear system")]
    SingularSystem,

    #[error("spectrum failure: eigenvalue iteration did not converge")]
    SpectrumFailure,

    #[error("no positive-definite solution: {0}")]
    NoPositiveDefiniteSolution(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("unstable pole request: {0} is not strictly negative")]
    UnstablePole(f64),

    #[error("plant blow-up at t = {t}")]
    PlantBlowUp { t: f64 },

    #[error("no ultimate bound available: certificate is not satisfied")]
    NoUltimateBound,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
