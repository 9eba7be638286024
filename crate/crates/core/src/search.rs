//! Instant search over website entries and per-tab row filters.
//!
//! Matching is a case-insensitive substring test. Case-insensitivity uses
//! simple (one-to-one) Unicode case folding, so a folded string has exactly
//! as many characters as its source and match offsets can be reported in
//! characters of the original text.

use std::borrow::Cow;

use serde::Serialize;

use crate::model::{Contact, Dataset, ImageRecord, Note, Notebook, RelatedUrl, TodoItem, VideoRecord, WebsiteEntry};
use crate::par::{self, Execution};

/// Folds one character. Where `char::to_lowercase` yields a single char it
/// agrees with simple case folding except for the handful of characters
/// listed here; multi-char lowercase forms have no simple folding.
pub fn fold_char(c: char) -> char {
    match c {
        '\u{00B5}' => '\u{03BC}',
        '\u{017F}' => 's',
        '\u{0345}' | '\u{1FBE}' => '\u{03B9}',
        '\u{03C2}' => '\u{03C3}',
        '\u{03D0}' => '\u{03B2}',
        '\u{03D1}' => '\u{03B8}',
        '\u{03D5}' => '\u{03C6}',
        '\u{03D6}' => '\u{03C0}',
        '\u{03F0}' => '\u{03BA}',
        '\u{03F1}' => '\u{03C1}',
        '\u{03F5}' => '\u{03B5}',
        '\u{1E9B}' => '\u{1E61}',
        '\u{1C80}' => '\u{0432}',
        '\u{1C81}' => '\u{0434}',
        '\u{1C82}' => '\u{043E}',
        '\u{1C83}' => '\u{0441}',
        '\u{1C84}' | '\u{1C85}' => '\u{0442}',
        '\u{1C86}' => '\u{044A}',
        '\u{1C87}' => '\u{0463}',
        '\u{1C88}' => '\u{A64B}',
        c if c.is_ascii() => c.to_ascii_lowercase(),
        c => {
            let mut lower = c.to_lowercase();
            match (lower.next(), lower.next()) {
                (Some(l), None) => l,
                _ => c,
            }
        }
    }
}

pub fn fold_case(s: &str) -> String {
    s.chars().map(fold_char).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Name,
    Location,
    Purpose,
}

impl Field {
    pub const ALL: [Field; 3] = [Field::Name, Field::Location, Field::Purpose];

    pub fn of(self, entry: &WebsiteEntry) -> &str {
        match self {
            Field::Name => &entry.name,
            Field::Location => &entry.location,
            Field::Purpose => &entry.purpose,
        }
    }
}

/// One matching field of one entry. `offset` counts characters of the
/// original field text up to the first occurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Hit {
    pub entry: usize,
    pub field: Field,
    pub offset: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Folded([String; 3]);

impl Folded {
    fn of(entry: &WebsiteEntry) -> Self {
        Folded(Field::ALL.map(|f| fold_case(f.of(entry))))
    }

    fn hits(&self, entry: usize, needle: &str, out: &mut Vec<Hit>) {
        for (field, text) in Field::ALL.into_iter().zip(&self.0) {
            if let Some(b) = text.find(needle) {
                let offset = text[..b].chars().count();
                out.push(Hit { entry, field, offset });
            }
        }
    }

    fn matches(&self, needle: &str) -> bool {
        self.0.iter().any(|t| t.contains(needle))
    }
}

/// Folded copies of every entry's name, location and purpose, in
/// notebook order. Entry ids are positions in the notebook.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchIndex {
    entries: Vec<Folded>,
}

const PARALLEL_MIN_ENTRIES: usize = 4096;

impl SearchIndex {
    pub fn build(nb: &Notebook) -> Self {
        SearchIndex {
            entries: nb.websites.iter().map(Folded::of).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Keeps the index in step with an appended entry.
    pub fn push(&mut self, entry: &WebsiteEntry) {
        self.entries.push(Folded::of(entry));
    }

    /// Keeps the index in step with an edited entry.
    pub fn update(&mut self, id: usize, entry: &WebsiteEntry) {
        self.entries[id] = Folded::of(entry);
    }

    /// Keeps the index in step with a removed entry; later ids shift down.
    pub fn remove(&mut self, id: usize) {
        self.entries.remove(id);
    }

    pub fn query(&self, text: &str) -> Vec<Hit> {
        self.query_with(text, Execution::default())
    }

    /// Hits in entry order, then by field (name, location, purpose).
    pub fn query_with(&self, text: &str, exec: Execution) -> Vec<Hit> {
        let needle = fold_case(text);
        if self.entries.len() < PARALLEL_MIN_ENTRIES || exec == Execution::Sequential {
            let mut out = Vec::new();
            for (i, e) in self.entries.iter().enumerate() {
                e.hits(i, &needle, &mut out);
            }
            return out;
        }
        let chunk = self.entries.len().div_ceil(64);
        let starts: Vec<usize> = (0..self.entries.len()).step_by(chunk).collect();
        par::map(exec, &starts, |&start| {
            let mut out = Vec::new();
            let end = (start + chunk).min(self.entries.len());
            for (i, e) in self.entries[start..end].iter().enumerate() {
                e.hits(start + i, &needle, &mut out);
            }
            out
        })
        .concat()
    }

    /// Distinct matching entry ids in order.
    pub fn entry_ids(&self, text: &str) -> Vec<usize> {
        let needle = fold_case(text);
        (0..self.entries.len())
            .filter(|&i| self.entries[i].matches(&needle))
            .collect()
    }
}

/// Per-keystroke search. When the new text extends the previous one only
/// the previous matches are rescanned, since a longer needle can only
/// narrow the result.
#[derive(Debug, Clone)]
pub struct SearchSession<'a> {
    index: &'a SearchIndex,
    last: String,
    candidates: Vec<usize>,
}

impl<'a> SearchSession<'a> {
    pub fn new(index: &'a SearchIndex) -> Self {
        SearchSession {
            index,
            last: String::new(),
            candidates: (0..index.len()).collect(),
        }
    }

    pub fn update(&mut self, text: &str) -> Vec<Hit> {
        let needle = fold_case(text);
        if !needle.starts_with(&self.last) {
            self.candidates = (0..self.index.len()).collect();
        }
        let mut hits = Vec::new();
        self.candidates.retain(|&i| {
            let before = hits.len();
            self.index.entries[i].hits(i, &needle, &mut hits);
            hits.len() > before
        });
        self.last = needle;
        hits
    }
}

/// A table row searchable by its visible text columns.
pub trait Row {
    fn fields(&self) -> Vec<Cow<'_, str>>;
}

impl Row for Vec<String> {
    fn fields(&self) -> Vec<Cow<'_, str>> {
        self.iter().map(|s| Cow::Borrowed(s.as_str())).collect()
    }
}

impl Row for &[&str] {
    fn fields(&self) -> Vec<Cow<'_, str>> {
        self.iter().map(|s| Cow::Borrowed(*s)).collect()
    }
}

impl Row for RelatedUrl {
    fn fields(&self) -> Vec<Cow<'_, str>> {
        vec![self.value.as_str().into(), self.notes.as_str().into()]
    }
}

impl Row for Contact {
    fn fields(&self) -> Vec<Cow<'_, str>> {
        [&self.name, &self.surname, &self.email, &self.webpage, &self.notes]
            .map(|s| Cow::Borrowed(s.as_str()))
            .into()
    }
}

impl Row for Dataset {
    fn fields(&self) -> Vec<Cow<'_, str>> {
        vec![self.name.as_str().into(), self.notes.as_str().into()]
    }
}

impl Row for ImageRecord {
    fn fields(&self) -> Vec<Cow<'_, str>> {
        let mut f: Vec<Cow<'_, str>> = vec![self.name.as_str().into(), self.notes.as_str().into()];
        if let Some(url) = &self.related_url {
            f.push(url.as_str().into());
        }
        f
    }
}

impl Row for VideoRecord {
    fn fields(&self) -> Vec<Cow<'_, str>> {
        vec![self.name.as_str().into(), self.notes.as_str().into()]
    }
}

impl Row for TodoItem {
    fn fields(&self) -> Vec<Cow<'_, str>> {
        let mut f: Vec<Cow<'_, str>> = vec![self.text.as_str().into()];
        if let Some(d) = self.due_date {
            f.push(d.to_string().into());
        }
        f
    }
}

impl Row for Note {
    fn fields(&self) -> Vec<Cow<'_, str>> {
        vec![self.text.as_str().into()]
    }
}

/// Rows with any field containing `keyword`, in their original order.
pub fn filter_rows<'r, T: Row>(rows: &'r [T], keyword: &str) -> Vec<&'r T> {
    let needle = fold_case(keyword);
    rows.iter()
        .filter(|r| r.fields().iter().any(|f| fold_case(f).contains(&needle)))
        .collect()
}
