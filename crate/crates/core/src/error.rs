//! Error types shared across the toolkit.

use thiserror::Error;

use crate::classify::NotCoveredReason;

#[derive(Debug, Error)]
pub enum Error {
    /// A domain invariant was violated; names the offending field.
    #[error("invalid {field}: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    /// The requested operation has no contract for these inputs.
    #[error("{op}: not applicable ({reason})")]
    NotApplicable { op: &'static str, reason: String },

    /// Widths of a non-compact embedding do not tend to zero.
    #[error("embedding is not compact ({detail})")]
    NotCompact { detail: String },

    /// Search space too large for the desk-scale oracle.
    #[error("{0}")]
    Refused(String),

    /// Truncation limits prevent reaching the requested remainder target.
    #[error("truncation limit: {0}")]
    TruncationLimit(String),

    /// Rate verification needs a covered classification.
    #[error("classification not covered: {reason}")]
    NotCovered { reason: NotCoveredReason },

    /// A width table failed validation.
    #[error("invalid width table: {0}")]
    InvalidTable(String),

    /// Internal case-table dispatch failure.
    #[error("case analysis error: {0}")]
    CaseAnalysis(String),
}

impl Error {
    pub fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field,
            reason: reason.into(),
        }
    }

    pub fn not_applicable(op: &'static str, reason: impl Into<String>) -> Self {
        Error::NotApplicable {
            op,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
