//! Solar Lab Notebook (`.sln`) toolkit.
//!
//! An `.sln` file is a UTF-8 XML document holding a list of "website"
//! entries, each grouping related links, contacts, text datasets, images
//! (embedded as base64 data URIs), videos, to-do items and notes.
//!
//! - [`model`]: the in-memory document and its invariants
//! - [`xml`]: streaming reader, canonical writer and one-pass statistics
//! - [`schema`]: rule-based validation with path-addressed findings
//! - [`media`]: data URIs, format sniffing, crop/scale/thumbnail
//! - [`search`]: instant search over entries and per-tab row filters
//! - [`ops`]: merge, diff/patch, extraction and fixture generation

pub mod media;
pub mod model;
pub mod ops;
pub mod par;
pub mod schema;
pub mod search;
pub mod text;
pub mod xml;

pub use model::{new_notebook, Notebook, WebsiteEntry};
pub use par::Execution;
