use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "cannot place node {node} with minimum spacing {min_spacing_km} km after {attempts} attempts"
    )]
    SpacingInfeasible {
        node: usize,
        min_spacing_km: f64,
        attempts: usize,
    },

    #[error("unknown node id {0}")]
    UnknownNode(usize),

    #[error("no link between nodes {0} and {1}")]
    MissingLink(usize, usize),

    #[error("link ({0}, {1}) has an empty history")]
    EmptyHistory(usize, usize),

    #[error("no active links")]
    NoActiveLinks,

    #[error("path is empty")]
    EmptyPath,

    #[error("mean path length is zero")]
    ZeroPathLength,

    #[error("group `{0}` has no records")]
    EmptyGroup(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("simulation invariant violated: {0}")]
    Invariant(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn ensure(cond: bool, name: &'static str, reason: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: reason.into(),
        })
    }
}
