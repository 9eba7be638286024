//! In-memory form of a Solar Lab Notebook document.
//!
//! A [`Notebook`] is an ordered list of [`WebsiteEntry`] values. Each entry
//! groups everything recorded about one data gateway: related links, contacts,
//! text datasets, images, videos, to-do items and free-form notes. Types here
//! know nothing about XML; see [`crate::xml`] for the wire format.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use thiserror::Error;

use crate::media::{MediaType, MAX_EDITOR_DIMENSION};
use crate::text::first_illegal_char;

/// Namespace every element of an SLN document lives in.
pub const SLN_NAMESPACE: &str = "http://umbra.nascom.nasa.gov/";

/// Schema location hint written on the root element of new notebooks.
pub const DEFAULT_SCHEMA_LOCATION: &str =
    "http://umbra.nascom.nasa.gov/ http://umbra.nascom.nasa.gov/sln/schema/sln.xsd";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{field} must not be empty")]
    EmptyField { field: &'static str },
    #[error("{field} contains U+{code:04X}, which cannot appear in an XML document")]
    IllegalCharacter { field: &'static str, code: u32 },
    #[error("invalid date {0:?}: expected a real calendar date written YYYY-MM-DD")]
    InvalidDate(String),
    #[error("image {field} of {value} px is outside 1..={MAX_EDITOR_DIMENSION}")]
    DimensionOutOfRange { field: &'static str, value: u32 },
    #[error("thumbnail {thumb_w}x{thumb_h} is larger than the full image {full_w}x{full_h}")]
    ThumbnailTooLarge {
        thumb_w: u32,
        thumb_h: u32,
        full_w: u32,
        full_h: u32,
    },
}

/// Calendar date restricted to the lexical form `YYYY-MM-DD` (years 0001-9999).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Date(NaiveDate);

impl Date {
    pub fn from_ymd(year: i32, month: u32, day: u32) -> Option<Self> {
        if !(1..=9999).contains(&year) {
            return None;
        }
        NaiveDate::from_ymd_opt(year, month, day).map(Date)
    }

    pub fn year(&self) -> i32 {
        self.0.year()
    }

    pub fn month(&self) -> u32 {
        self.0.month()
    }

    pub fn day(&self) -> u32 {
        self.0.day()
    }

    /// `None` when the result would leave the four-digit year range.
    pub fn add_days(self, days: u64) -> Option<Self> {
        let d = self.0.checked_add_days(chrono::Days::new(days))?;
        Date::from_ymd(d.year(), d.month(), d.day())
    }
}

impl FromStr for Date {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let invalid = || ModelError::InvalidDate(s.to_owned());
        let b = s.as_bytes();
        if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
            return Err(invalid());
        }
        let digits = |r: std::ops::Range<usize>| -> Option<u32> {
            b[r].iter().try_fold(0u32, |acc, &c| {
                c.is_ascii_digit().then(|| acc * 10 + u32::from(c - b'0'))
            })
        };
        let (Some(y), Some(m), Some(d)) = (digits(0..4), digits(5..7), digits(8..10)) else {
            return Err(invalid());
        };
        Date::from_ymd(y as i32, m, d).ok_or_else(invalid)
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year(), self.month(), self.day())
    }
}

/// Root container: the content of one `.sln` file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Notebook {
    pub websites: Vec<WebsiteEntry>,
    pub schema_location: Option<String>,
}

/// A fresh notebook as produced by the "New" action: no entries, with the
/// standard schema location hint.
pub fn new_notebook() -> Notebook {
    Notebook {
        websites: Vec::new(),
        schema_location: Some(DEFAULT_SCHEMA_LOCATION.to_owned()),
    }
}

impl Notebook {
    /// Appends `entry` after the existing entries.
    pub fn add_website(mut self, entry: WebsiteEntry) -> Result<Self, ModelError> {
        entry.validate()?;
        self.websites.push(entry);
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if let Some(loc) = &self.schema_location {
            check_text("schema_location", loc)?;
        }
        self.websites.iter().try_for_each(WebsiteEntry::validate)
    }
}

/// Free-function form of [`Notebook::add_website`].
pub fn add_website(nb: Notebook, entry: WebsiteEntry) -> Result<Notebook, ModelError> {
    nb.add_website(entry)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WebsiteEntry {
    pub name: String,
    pub location: String,
    pub purpose: String,
    pub date: Date,
    pub related: Vec<RelatedUrl>,
    pub contacts: Vec<Contact>,
    pub datasets: Vec<Dataset>,
    pub images: Vec<ImageRecord>,
    pub videos: Vec<VideoRecord>,
    pub todos: Vec<TodoItem>,
    pub other_notes: Vec<Note>,
}

impl WebsiteEntry {
    /// Entry with the four main-tab fields set and every group empty.
    pub fn new(
        name: impl Into<String>,
        location: impl Into<String>,
        purpose: impl Into<String>,
        date: Date,
    ) -> Self {
        WebsiteEntry {
            name: name.into(),
            location: location.into(),
            purpose: purpose.into(),
            date,
            related: Vec::new(),
            contacts: Vec::new(),
            datasets: Vec::new(),
            images: Vec::new(),
            videos: Vec::new(),
            todos: Vec::new(),
            other_notes: Vec::new(),
        }
    }

    /// Merge/diff identity of an entry.
    pub fn key(&self) -> (&str, &str) {
        (&self.name, &self.location)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        check_name("website name", &self.name)?;
        check_text("website location", &self.location)?;
        check_text("website purpose", &self.purpose)?;
        self.related.iter().try_for_each(RelatedUrl::validate)?;
        self.contacts.iter().try_for_each(Contact::validate)?;
        self.datasets.iter().try_for_each(Dataset::validate)?;
        self.images.iter().try_for_each(ImageRecord::validate)?;
        self.videos.iter().try_for_each(VideoRecord::validate)?;
        self.todos.iter().try_for_each(TodoItem::validate)?;
        self.other_notes.iter().try_for_each(Note::validate)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelatedUrl {
    pub value: String,
    pub notes: String,
}

impl RelatedUrl {
    pub fn validate(&self) -> Result<(), ModelError> {
        check_name("related url", &self.value)?;
        check_text("related url notes", &self.notes)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contact {
    pub name: String,
    pub surname: String,
    pub email: String,
    pub webpage: String,
    pub notes: String,
}

impl Contact {
    pub fn validate(&self) -> Result<(), ModelError> {
        check_name("contact name", &self.name)?;
        check_name("contact surname", &self.surname)?;
        check_text("contact email", &self.email)?;
        check_text("contact webpage", &self.webpage)?;
        check_text("contact notes", &self.notes)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub name: String,
    pub notes: String,
    pub content: String,
}

impl Dataset {
    pub fn validate(&self) -> Result<(), ModelError> {
        check_name("dataset name", &self.name)?;
        check_text("dataset notes", &self.notes)?;
        check_text("dataset content", &self.content)
    }
}

/// Embedded binary payload, carried on the wire as a base64 data URI.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MediaBlob {
    pub media_type: MediaType,
    pub payload: Vec<u8>,
}

impl MediaBlob {
    pub fn new(media_type: MediaType, payload: Vec<u8>) -> Self {
        MediaBlob {
            media_type,
            payload,
        }
    }

    /// Length of the padded base64 form of the payload.
    pub fn encoded_len(&self) -> usize {
        self.payload.len().div_ceil(3) * 4
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageRecord {
    pub name: String,
    pub notes: String,
    pub related_url: Option<String>,
    pub full: MediaBlob,
    pub thumbnail: MediaBlob,
    pub full_width: u32,
    pub full_height: u32,
    pub thumb_width: u32,
    pub thumb_height: u32,
}

impl ImageRecord {
    pub fn validate(&self) -> Result<(), ModelError> {
        check_name("image name", &self.name)?;
        check_text("image notes", &self.notes)?;
        if let Some(url) = &self.related_url {
            check_text("image related url", url)?;
        }
        for (field, value) in [
            ("full width", self.full_width),
            ("full height", self.full_height),
            ("thumbnail width", self.thumb_width),
            ("thumbnail height", self.thumb_height),
        ] {
            if !(1..=MAX_EDITOR_DIMENSION).contains(&value) {
                return Err(ModelError::DimensionOutOfRange { field, value });
            }
        }
        if self.thumb_width > self.full_width || self.thumb_height > self.full_height {
            return Err(ModelError::ThumbnailTooLarge {
                thumb_w: self.thumb_width,
                thumb_h: self.thumb_height,
                full_w: self.full_width,
                full_h: self.full_height,
            });
        }
        Ok(())
    }
}

/// Placeholder record for the videos group; media is stored but never decoded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VideoRecord {
    pub name: String,
    pub notes: String,
    pub media: Option<MediaBlob>,
}

impl VideoRecord {
    pub fn validate(&self) -> Result<(), ModelError> {
        check_name("video name", &self.name)?;
        check_text("video notes", &self.notes)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TodoItem {
    pub text: String,
    pub due_date: Option<Date>,
    pub done: bool,
}

impl TodoItem {
    pub fn validate(&self) -> Result<(), ModelError> {
        check_name("todo text", &self.text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Note {
    pub text: String,
}

impl Note {
    pub fn validate(&self) -> Result<(), ModelError> {
        check_text("note", &self.text)
    }
}

fn check_text(field: &'static str, value: &str) -> Result<(), ModelError> {
    match first_illegal_char(value) {
        Some(c) => Err(ModelError::IllegalCharacter {
            field,
            code: c as u32,
        }),
        None => Ok(()),
    }
}

// attribStringType: any XML text of length >= 1.
fn check_name(field: &'static str, value: &str) -> Result<(), ModelError> {
    if value.is_empty() {
        return Err(ModelError::EmptyField { field });
    }
    check_text(field, value)
}
