use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumError {
    #[error("series did not reach tolerance within {terms} terms")]
    NonConvergent { terms: usize },
    #[error("invalid precision policy: {0}")]
    Precision(String),
    #[error("cannot parse number {0:?}")]
    Parse(String),
}
