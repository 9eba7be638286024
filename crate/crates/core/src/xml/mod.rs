//! XML codec for `.sln` documents.
//!
//! [`XmlReader`] is a forward-only pull parser that keeps memory bounded:
//! character data is delivered in chunks of at most [`TEXT_CHUNK`] bytes, so
//! a multi-hundred-megabyte dataset never has to be resident at once. The
//! notebook decoder, the statistics scanner and the schema validator are all
//! built on top of it.

use std::fmt;
use std::io;

use thiserror::Error;

mod decode;
pub(crate) mod encode;
mod reader;
mod stats;

pub use decode::{parse_notebook, parse_notebook_slice, parse_notebook_with, ParseOptions};
pub use encode::{serialize_notebook, serialize_to_vec};
pub use reader::{Attribute, EndTag, Event, StartTag, XmlReader, TEXT_CHUNK};
pub use stats::{stream_stats, StreamStats};

pub const XSI_NAMESPACE: &str = "http://www.w3.org/2001/XMLSchema-instance";
pub const XML_NAMESPACE: &str = "http://www.w3.org/XML/1998/namespace";

/// 1-based line and byte column within the source document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Position {
    pub line: u64,
    pub column: u64,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParseErrorKind {
    NotWellFormed,
    WrongRootNamespace,
    UnknownElement,
    BadAttribute,
    BadEncoding,
    /// A required child element is absent.
    MissingElement,
    /// Structurally fine, but a value cannot be represented in the model
    /// (impossible date, undecodable data URI, out-of-range dimension).
    InvalidValue,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ParseErrorKind::NotWellFormed => "not well-formed",
            ParseErrorKind::WrongRootNamespace => "wrong root element",
            ParseErrorKind::UnknownElement => "unknown element",
            ParseErrorKind::BadAttribute => "bad attribute",
            ParseErrorKind::BadEncoding => "bad encoding",
            ParseErrorKind::MissingElement => "missing element",
            ParseErrorKind::InvalidValue => "invalid value",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at {line}:{column}: {detail}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: u64,
    pub column: u64,
    pub detail: String,
}

impl ParseError {
    pub fn new(kind: ParseErrorKind, at: Position, detail: impl Into<String>) -> Self {
        ParseError {
            kind,
            line: at.line,
            column: at.column,
            detail: detail.into(),
        }
    }

    pub fn position(&self) -> Position {
        Position {
            line: self.line,
            column: self.column,
        }
    }
}

#[derive(Debug, Error)]
pub enum XmlError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl XmlError {
    pub fn parse_error(&self) -> Option<&ParseError> {
        match self {
            XmlError::Parse(e) => Some(e),
            XmlError::Io(_) => None,
        }
    }
}

pub(crate) fn is_xml_whitespace(s: &str) -> bool {
    s.bytes().all(|b| matches!(b, b' ' | b'\t' | b'\n' | b'\r'))
}
