//! Error types shared across the crate.

use std::fmt;
use std::path::PathBuf;

use crate::indexing::Convention;
use crate::registry::Priority;

/// An index fell outside the valid range of a node.
///
/// The message mirrors the familiar "attempt to access N-element ... at index [i]" wording so
/// that off-by-one convention mistakes are easy to recognise.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error(
    "BoundsError: attempt to access {length}-element array at index [{index}] \
     (valid indices under {convention}: {})",
    valid_range(*.length, *.convention)
)]
pub struct BoundsError {
    pub index: i64,
    pub length: usize,
    pub convention: Convention,
}

fn valid_range(length: usize, convention: Convention) -> String {
    let first = convention.base() as i64;
    if length == 0 {
        "none".to_string()
    } else {
        format!("{first}..={}", first + length as i64 - 1)
    }
}

impl BoundsError {
    pub(crate) fn zero_based(index: usize, length: usize) -> Self {
        BoundsError {
            index: index as i64,
            length,
            convention: Convention::ZERO_BASED,
        }
    }
}

/// A record was asked for a field it does not declare.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no field {requested:?} in record; available fields: [{}]", .available.join(", "))]
pub struct FieldError {
    pub requested: String,
    pub available: Vec<String>,
}

/// The structural rule a [`ValidationError`] reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    PrimitiveByteLength,
    OffsetsLength,
    NonNegativeFirstOffset,
    MonotonicOffsets,
    FinalOffsetWithinContent,
    EmptyFieldName,
    UniqueFieldNames,
    RecordFieldLength,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::PrimitiveByteLength => "primitive byte length",
            Rule::OffsetsLength => "offsets length",
            Rule::NonNegativeFirstOffset => "non-negative first offset",
            Rule::MonotonicOffsets => "monotonic offsets",
            Rule::FinalOffsetWithinContent => "final offset within content",
            Rule::EmptyFieldName => "non-empty field names",
            Rule::UniqueFieldNames => "unique field names",
            Rule::RecordFieldLength => "record field length",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A layout invariant does not hold. `path` locates the offending node from the root,
/// e.g. `root.content["a"]`.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("ValidationError at {path}: {rule}: {detail}")]
pub struct ValidationError {
    pub path: String,
    pub rule: Rule,
    pub detail: String,
}

/// Problems with a form document.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormError {
    #[error("ParseError at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("UnsupportedLayoutError: {0}")]
    UnsupportedLayout(String),
    #[error("SchemaError: missing required key {missing:?} at {path}")]
    MissingKey { missing: String, path: String },
    #[error("SchemaError at {path}: {message}")]
    Schema { path: String, message: String },
}

/// Failures of the buffer interchange protocol and the on-disk container.
#[derive(Debug, thiserror::Error)]
pub enum BufferError {
    #[error("MissingBufferError: form references buffer {0:?} which is not present")]
    MissingBuffer(String),
    #[error("SizeError: buffer {name:?} holds {actual} bytes, need at least {required}")]
    Size {
        name: String,
        required: usize,
        actual: usize,
    },
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("FormatError: {0}")]
    Format(String),
    #[error("I/O error on {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Conversion dispatch failures.
#[derive(Debug, thiserror::Error)]
pub enum ConvertError {
    #[error("NoRuleError: no conversion rule accepted {type_key:?} (tiers tried: {})", fmt_tiers(.tiers_tried))]
    NoRule {
        type_key: String,
        tiers_tried: Vec<Priority>,
    },
    #[error("payload of {0:?} is not a buffer container")]
    Payload(String),
    #[error(transparent)]
    Buffer(#[from] BufferError),
}

fn fmt_tiers(tiers: &[Priority]) -> String {
    if tiers.is_empty() {
        return "none".to_string();
    }
    tiers
        .iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// A node was not of the kind or element type an operation requires.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("LayoutError: expected {expected}, found {found}")]
pub struct LayoutError {
    pub expected: String,
    pub found: String,
}
