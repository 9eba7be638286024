//! Whole-notebook tooling: merging, key-based diff and patch, extraction of
//! embedded files and synthetic fixtures for load testing.

mod diff;
mod extract;
mod fixture;
mod merge;

pub use diff::{diff, patch, Change, EntryKey, FieldChange, PatchError};
pub use extract::{extract_datasets, extract_media, sanitize_file_name, ExtractError, Manifest, ManifestEntry};
pub use fixture::{generate_fixture, generate_fixture_file, FixtureManifest, FixtureSpec};
pub use merge::{merge, MergePolicy};
