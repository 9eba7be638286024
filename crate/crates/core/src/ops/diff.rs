use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::model::{
    Contact, Dataset, Date, ImageRecord, Note, Notebook, RelatedUrl, TodoItem, VideoRecord, WebsiteEntry,
};

/// Identifies an entry across two notebooks. `occurrence` separates
/// entries sharing a name and location, counted from 0 in document order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntryKey {
    pub name: String,
    pub location: String,
    pub occurrence: usize,
}

impl fmt::Display for EntryKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} <{}>", self.name, self.location)?;
        if self.occurrence > 0 {
            write!(f, " #{}", self.occurrence + 1)?;
        }
        Ok(())
    }
}

/// Replacement value for one field or group of an entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldChange {
    Purpose(String),
    Date(Date),
    Related(Vec<RelatedUrl>),
    Contacts(Vec<Contact>),
    Datasets(Vec<Dataset>),
    Images(Vec<ImageRecord>),
    Videos(Vec<VideoRecord>),
    Todos(Vec<TodoItem>),
    OtherNotes(Vec<Note>),
}

impl FieldChange {
    /// Element name of the field or group.
    pub fn name(&self) -> &'static str {
        match self {
            FieldChange::Purpose(_) => "purpose",
            FieldChange::Date(_) => "date",
            FieldChange::Related(_) => "related",
            FieldChange::Contacts(_) => "contacts",
            FieldChange::Datasets(_) => "datasets",
            FieldChange::Images(_) => "images",
            FieldChange::Videos(_) => "videos",
            FieldChange::Todos(_) => "todos",
            FieldChange::OtherNotes(_) => "othernotes",
        }
    }

    fn apply(&self, e: &mut WebsiteEntry) {
        match self {
            FieldChange::Purpose(v) => e.purpose = v.clone(),
            FieldChange::Date(v) => e.date = *v,
            FieldChange::Related(v) => e.related = v.clone(),
            FieldChange::Contacts(v) => e.contacts = v.clone(),
            FieldChange::Datasets(v) => e.datasets = v.clone(),
            FieldChange::Images(v) => e.images = v.clone(),
            FieldChange::Videos(v) => e.videos = v.clone(),
            FieldChange::Todos(v) => e.todos = v.clone(),
            FieldChange::OtherNotes(v) => e.other_notes = v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Change {
    SchemaLocation(Option<String>),
    Removed(EntryKey),
    Modified { key: EntryKey, changes: Vec<FieldChange> },
    /// Final relative order of the entries present on both sides.
    Reordered(Vec<EntryKey>),
    /// `index` is the entry's position in the target notebook.
    Added { index: usize, entry: Box<WebsiteEntry> },
}

impl fmt::Display for Change {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Change::SchemaLocation(Some(loc)) => write!(f, "~ schemaLocation {loc:?}"),
            Change::SchemaLocation(None) => write!(f, "- schemaLocation"),
            Change::Removed(key) => write!(f, "- website {key}"),
            Change::Modified { key, changes } => {
                let names: Vec<_> = changes.iter().map(FieldChange::name).collect();
                write!(f, "~ website {key}: {}", names.join(", "))
            }
            Change::Reordered(order) => write!(f, "~ order of {} shared websites", order.len()),
            Change::Added { index, entry } => {
                write!(f, "+ website {:?} <{}> at position {}", entry.name, entry.location, index + 1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatchError {
    #[error("patch refers to website {0} which is not present")]
    MissingEntry(EntryKey),
    #[error("insert position {0} is past the end")]
    BadIndex(usize),
}

fn keyed(nb: &Notebook) -> Vec<EntryKey> {
    let mut seen: HashMap<(&str, &str), usize> = HashMap::new();
    nb.websites
        .iter()
        .map(|w| {
            let n = seen.entry(w.key()).or_insert(0);
            let key = EntryKey {
                name: w.name.clone(),
                location: w.location.clone(),
                occurrence: *n,
            };
            *n += 1;
            key
        })
        .collect()
}

fn field_changes(a: &WebsiteEntry, b: &WebsiteEntry) -> Vec<FieldChange> {
    let mut out = Vec::new();
    if a.purpose != b.purpose {
        out.push(FieldChange::Purpose(b.purpose.clone()));
    }
    if a.date != b.date {
        out.push(FieldChange::Date(b.date));
    }
    macro_rules! group {
        ($field:ident, $variant:ident) => {
            if a.$field != b.$field {
                out.push(FieldChange::$variant(b.$field.clone()));
            }
        };
    }
    group!(related, Related);
    group!(contacts, Contacts);
    group!(datasets, Datasets);
    group!(images, Images);
    group!(videos, Videos);
    group!(todos, Todos);
    group!(other_notes, OtherNotes);
    out
}

/// Key-based changes turning `a` into `b`; empty when they are equal.
pub fn diff(a: &Notebook, b: &Notebook) -> Vec<Change> {
    let (ka, kb) = (keyed(a), keyed(b));
    let in_b: HashMap<&EntryKey, usize> = kb.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let in_a: HashMap<&EntryKey, usize> = ka.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mut out = Vec::new();
    if a.schema_location != b.schema_location {
        out.push(Change::SchemaLocation(b.schema_location.clone()));
    }
    for (i, key) in ka.iter().enumerate() {
        match in_b.get(key) {
            None => out.push(Change::Removed(key.clone())),
            Some(&j) => {
                let changes = field_changes(&a.websites[i], &b.websites[j]);
                if !changes.is_empty() {
                    out.push(Change::Modified { key: key.clone(), changes });
                }
            }
        }
    }
    let shared_a: Vec<&EntryKey> = ka.iter().filter(|k| in_b.contains_key(k)).collect();
    let shared_b: Vec<&EntryKey> = kb.iter().filter(|k| in_a.contains_key(k)).collect();
    if shared_a != shared_b {
        out.push(Change::Reordered(shared_b.into_iter().cloned().collect()));
    }
    for (j, key) in kb.iter().enumerate() {
        if !in_a.contains_key(key) {
            out.push(Change::Added {
                index: j,
                entry: Box::new(b.websites[j].clone()),
            });
        }
    }
    out
}

/// Applies a change list produced by [`diff`]: removals, edits, reordering,
/// then insertions in ascending position.
pub fn patch(a: &Notebook, changes: &[Change]) -> Result<Notebook, PatchError> {
    let mut rows: Vec<(EntryKey, WebsiteEntry)> = keyed(a).into_iter().zip(a.websites.iter().cloned()).collect();
    let mut schema_location = a.schema_location.clone();
    let find = |rows: &[(EntryKey, WebsiteEntry)], key: &EntryKey| {
        rows.iter()
            .position(|(k, _)| k == key)
            .ok_or_else(|| PatchError::MissingEntry(key.clone()))
    };
    for c in changes {
        match c {
            Change::SchemaLocation(loc) => schema_location = loc.clone(),
            Change::Removed(key) => {
                let i = find(&rows, key)?;
                rows.remove(i);
            }
            Change::Modified { key, changes } => {
                let i = find(&rows, key)?;
                changes.iter().for_each(|fc| fc.apply(&mut rows[i].1));
            }
            _ => {}
        }
    }
    if let Some(order) = changes.iter().find_map(|c| match c {
        Change::Reordered(order) => Some(order),
        _ => None,
    }) {
        let mut reordered = Vec::with_capacity(rows.len());
        for key in order {
            let i = find(&rows, key)?;
            reordered.push(rows.swap_remove(i));
        }
        reordered.append(&mut rows);
        rows = reordered;
    }
    let mut websites: Vec<WebsiteEntry> = rows.into_iter().map(|(_, w)| w).collect();
    let mut added: Vec<(usize, &WebsiteEntry)> = changes
        .iter()
        .filter_map(|c| match c {
            Change::Added { index, entry } => Some((*index, &**entry)),
            _ => None,
        })
        .collect();
    added.sort_by_key(|(i, _)| *i);
    for (index, entry) in added {
        if index > websites.len() {
            return Err(PatchError::BadIndex(index));
        }
        websites.insert(index, entry.clone());
    }
    Ok(Notebook { websites, schema_location })
}
