use thiserror::Error;

use crate::topology::NodeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A node has no path to one of the anchors.
    #[error("node {node} cannot reach anchor {anchor}")]
    Unreachable { node: NodeId, anchor: NodeId },

    #[error("node {0} has no view for the requested metric")]
    MissingView(NodeId),

    /// A protocol was asked to run without the state it needs.
    #[error("protocol `{protocol}` requires {what}")]
    MissingState {
        protocol: &'static str,
        what: &'static str,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid value for `{field}`: {msg}")]
    Validation { field: String, msg: String },

    #[error("no connected deployment after {attempts} attempts")]
    GaveUp { attempts: u32 },

    #[error("deployment is not connected")]
    Disconnected,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn validation(field: &str, msg: impl Into<String>) -> Self {
        Error::Validation {
            field: field.to_string(),
            msg: msg.into(),
        }
    }
}
