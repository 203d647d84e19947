use thiserror::Error;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("unknown search mode '{name}' (available: {available})")]
    UnknownStrategy { name: String, available: String },
    #[error("checkpoint {path}: {message}")]
    Checkpoint { path: String, message: String },
    #[error("thread pool: {0}")]
    ThreadPool(String),
}
