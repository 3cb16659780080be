use thiserror::Error;

use crate::reputation::NodeId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("node {0} is not registered")]
    Unregistered(NodeId),

    #[error("reputation table is empty")]
    EmptyTable,

    #[error("operation not allowed in the current phase: {0}")]
    Phase(&'static str),

    #[error("submission rejected: node is not selected for this task")]
    NotSelected,

    #[error("submission rejected: duplicate commit from node {0}")]
    DuplicateCommit(NodeId),

    #[error("reveal rejected: node {0} has no commit in this task")]
    NoCommit(NodeId),

    #[error("reveal rejected: digest mismatch for node {0}")]
    DigestMismatch(NodeId),

    #[error("invalid run configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
