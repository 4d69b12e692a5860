use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("unsupported case: {0}")]
    Unsupported(String),
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },
    #[error("zero pivot in row {row}")]
    ZeroPivot { row: usize },
    #[error("singular matrix")]
    Singular,
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("splitting error: {0}")]
    Splitting(String),
    #[error("setup failed on level {level}: {source}")]
    Setup {
        level: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize, context: &'static str) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected,
            got,
            context,
        })
    }
}
