use thiserror::Error;

use crate::position::PositionReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The operation is undefined at this input (zero norm, zero valuation, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// The point lies on the zero locus of the named form or component.
    #[error("point lies on the support of {subject}")]
    Support { subject: String },

    #[error("parse error: {0}")]
    Parse(String),

    /// Every candidate was excluded; the position hypothesis failed upstream.
    #[error("no admissible combination: {0}")]
    Infeasible(String),

    #[error("unsupported subscheme class: {0}")]
    Unsupported(String),

    #[error("arrangement is not in {}-subgeneral position ({} witnesses)", .0.l, .0.witnesses.len())]
    Position(Box<PositionReport>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn support(subject: impl Into<String>) -> Self {
        Error::Support {
            subject: subject.into(),
        }
    }
}
