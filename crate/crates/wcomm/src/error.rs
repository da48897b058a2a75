//! Error types shared across the crate.
//!
//! Validation problems are collected exhaustively (a bad input file reports
//! every violation, not just the first). Everything else is a single
//! [`Error`] enum; the CLI maps its variants onto exit codes.

use std::fmt;

use crate::algebra::El;

/// One violation found while validating a raw algebra description.
///
/// `validate` returns the full list, so a report can show every problem in
/// one pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidationIssue {
    /// `size` must be at least 1 (pointed algebras are never empty).
    EmptyUniverse,
    /// The designated zero id does not lie in `0..size`.
    ZeroOutOfRange { zero: usize, size: usize },
    /// The signature declares no nullary operation to name the zero.
    MissingZeroConstant,
    /// Two operations share a name.
    DuplicateOperationName { name: String },
    /// A table's length does not match `size^arity`.
    TableShape {
        op: String,
        expected: usize,
        got: usize,
    },
    /// A table entry is not an element id.
    EntryOutOfRange {
        op: String,
        flat_index: usize,
        value: usize,
        size: usize,
    },
    /// An operation applied to the all-zero tuple does not return zero.
    PointednessViolation { op: String, value: El },
    /// `declared_properties` contains a string outside the known vocabulary.
    UnknownDeclaredProperty { name: String },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::EmptyUniverse => write!(
                f,
                "universe is empty; a pointed algebra needs at least the zero element"
            ),
            ValidationIssue::ZeroOutOfRange { zero, size } => {
                write!(f, "zero id {zero} out of range for size {size}")
            }
            ValidationIssue::MissingZeroConstant => {
                write!(f, "signature has no nullary operation naming the zero")
            }
            ValidationIssue::DuplicateOperationName { name } => {
                write!(f, "duplicate operation name `{name}`")
            }
            ValidationIssue::TableShape { op, expected, got } => {
                write!(f, "table for `{op}` has {got} entries, expected {expected}")
            }
            ValidationIssue::EntryOutOfRange {
                op,
                flat_index,
                value,
                size,
            } => {
                write!(
                    f,
                    "table for `{op}` contains {value} at flat index {flat_index}, out of range for size {size}"
                )
            }
            ValidationIssue::PointednessViolation { op, value } => {
                write!(
                    f,
                    "pointedness violation: `{op}` on the all-zero tuple yields {value}, not zero"
                )
            }
            ValidationIssue::UnknownDeclaredProperty { name } => {
                write!(f, "unknown declared property `{name}`")
            }
        }
    }
}

/// Crate-wide error type.
#[derive(Debug)]
pub enum Error {
    /// A raw algebra description failed validation; all violations listed.
    Validation(Vec<ValidationIssue>),
    /// A constructed algebra or table would exceed the configured size cap.
    SizeCap { required: usize, cap: usize },
    /// A free-algebra closure exceeded the configured element cap.
    FreeCap {
        generators: usize,
        reached: usize,
        cap: usize,
    },
    /// Two objects that must share a parent algebra do not.
    ParentMismatch { operation: &'static str },
    /// An element id outside the universe was supplied.
    IdOutOfRange { id: usize, size: usize },
    /// A relation handed in as a congruence is not one.
    NotACongruence { reason: String },
    /// A builder was given a table that does not satisfy the axioms of the
    /// requested structure (first violation reported).
    BadTable { reason: String },
    /// A subuniverse handed in as normal is not; the offending elements are
    /// the ones its normal closure adds.
    NotNormal { extra: Vec<El> },
    /// Term evaluation met a variable the assignment does not cover.
    UnboundVariable { var: String },
    /// Term evaluation met an operation applied to the wrong number of
    /// arguments.
    ArityMismatch {
        op: String,
        expected: usize,
        got: usize,
    },
    /// The Smith commutator was requested outside its domain.
    MaltsevRequired,
    /// The ring closed form was requested on an algebra that is not a
    /// declared-and-verified commutative ring.
    NotCommutativeRing { reason: String },
    /// A computation was refused because a stated precondition cannot be
    /// checked or does not hold (e.g. oracle beyond its size guard).
    Refused { reason: String },
    /// An internal consistency check failed. This always indicates a defect.
    Internal(String),
    /// Reading or writing a file failed.
    Io(std::io::Error),
    /// A JSON document could not be parsed.
    Json(serde_json::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Validation(issues) => {
                write!(f, "validation failed with {} issue(s):", issues.len())?;
                for issue in issues {
                    write!(f, "\n  - {issue}")?;
                }
                Ok(())
            }
            Error::SizeCap { required, cap } => {
                write!(
                    f,
                    "size cap exceeded: construction requires {required} entries, cap is {cap}"
                )
            }
            Error::FreeCap {
                generators,
                reached,
                cap,
            } => {
                write!(
                    f,
                    "free-algebra cap exceeded on {generators} generators: reached {reached} elements, cap is {cap}"
                )
            }
            Error::ParentMismatch { operation } => {
                write!(
                    f,
                    "{operation}: arguments belong to different parent algebras"
                )
            }
            Error::IdOutOfRange { id, size } => {
                write!(f, "element id {id} out of range for size {size}")
            }
            Error::NotACongruence { reason } => write!(f, "not a congruence: {reason}"),
            Error::BadTable { reason } => write!(f, "table rejected: {reason}"),
            Error::NotNormal { extra } => {
                write!(
                    f,
                    "subuniverse is not normal; its normal closure adds {extra:?}"
                )
            }
            Error::UnboundVariable { var } => write!(f, "unbound variable {var}"),
            Error::ArityMismatch { op, expected, got } => {
                write!(
                    f,
                    "operation `{op}` expects {expected} argument(s), term supplies {got}"
                )
            }
            Error::MaltsevRequired => {
                write!(
                    f,
                    "Smith commutator undefined for this engine outside Mal'tsev varieties"
                )
            }
            Error::NotCommutativeRing { reason } => {
                write!(f, "not a verified commutative ring: {reason}")
            }
            Error::Refused { reason } => write!(f, "computation refused: {reason}"),
            Error::Internal(msg) => write!(f, "internal error: {msg}"),
            Error::Io(e) => write!(f, "io error: {e}"),
            Error::Json(e) => write!(f, "json error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            Error::Json(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_display_lists_every_issue() {
        let err = Error::Validation(vec![
            ValidationIssue::ZeroOutOfRange { zero: 9, size: 4 },
            ValidationIssue::PointednessViolation {
                op: "f".into(),
                value: 1,
            },
        ]);
        let text = err.to_string();
        assert!(text.contains("2 issue(s)"));
        assert!(text.contains("zero id 9"));
        assert!(text.contains("pointedness violation"));
    }

    #[test]
    fn maltsev_refusal_message_is_stable() {
        assert_eq!(
            Error::MaltsevRequired.to_string(),
            "Smith commutator undefined for this engine outside Mal'tsev varieties"
        );
    }
}
