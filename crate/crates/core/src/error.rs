use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported jet order {0} (maximum is 3)")]
    UnsupportedOrder(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("degenerate value: {0}")]
    Degenerate(String),
    #[error("adapted frame construction failed: {0}")]
    Frame(String),
    #[error("connection does not preserve the paraquaternionic bundle (residual {0:e})")]
    NotParaquaternionic(f64),
    #[error("no PQKT structure: existence residual {0:e}")]
    NoPqkt(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("conformal factor is not positive at a sample point ({0})")]
    NonPositiveFactor(f64),
    #[error("manifest error at {path}: {msg}")]
    Manifest { path: String, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
