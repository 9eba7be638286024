use std::collections::{HashMap, HashSet};
use std::fs::OpenOptions;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::media::sniff_format;
use crate::model::Notebook;

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// File name inside the output directory.
    pub file: String,
    /// 1-based position of the owning website entry.
    pub website: usize,
    pub record: String,
    pub format: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

const MAX_STEM: usize = 180;

/// Maps a record name to a portable file-name fragment: ASCII letters,
/// digits, `.`, `_` and `-` pass through, every other byte of the UTF-8
/// form becomes `%HH`. A leading dot is escaped too, so no output is hidden
/// or names a parent directory.
pub fn sanitize_file_name(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for (i, b) in name.bytes().enumerate() {
        let keep = b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-') || (b == b'.' && i > 0);
        let piece = if keep { (b as char).to_string() } else { format!("%{b:02X}") };
        if out.len() + piece.len() > MAX_STEM {
            break;
        }
        out.push_str(&piece);
    }
    out
}

struct Planned<'a> {
    stem: String,
    ext: &'static str,
    website: usize,
    record: &'a str,
    bytes: &'a [u8],
}

fn write_all(dir: &Path, planned: Vec<Planned<'_>>, formats: impl Fn(&str) -> String) -> Result<Manifest, ExtractError> {
    let mut totals: HashMap<(String, &str), usize> = HashMap::new();
    for p in &planned {
        *totals.entry((p.stem.clone(), p.ext)).or_default() += 1;
    }
    let mut next: HashMap<(String, &str), usize> = HashMap::new();
    let mut taken: HashSet<String> = HashSet::new();
    let mut files = Vec::with_capacity(planned.len());
    for p in planned {
        let key = (p.stem.clone(), p.ext);
        let first = usize::from(totals[&key] > 1);
        let n = next.entry(key).or_insert(first);
        let (file, path, mut handle) = loop {
            let name = match *n {
                0 => format!("{}.{}", p.stem, p.ext),
                k => format!("{}-{k}.{}", p.stem, p.ext),
            };
            *n += 1;
            if taken.contains(&name) {
                continue;
            }
            let path = dir.join(&name);
            match OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(f) => {
                    taken.insert(name.clone());
                    break (name, path, f);
                }
                Err(e) if e.kind() == io::ErrorKind::AlreadyExists => continue,
                Err(source) => return Err(ExtractError::Io { path, source }),
            }
        };
        let written: io::Result<()> = handle.write_all(p.bytes);
        written.map_err(|source| ExtractError::Io { path: path.clone(), source })?;
        files.push(ManifestEntry {
            file,
            website: p.website,
            record: p.record.to_owned(),
            format: formats(p.ext),
            bytes: p.bytes.len() as u64,
        });
    }
    Ok(Manifest { files })
}

fn check_dir(dir: &Path) -> Result<(), ExtractError> {
    std::fs::create_dir_all(dir).map_err(|source| ExtractError::Io {
        path: dir.to_owned(),
        source,
    })
}

/// Writes every image's full-size payload as
/// `<website-index>-<image-name>.<ext>`, with the extension taken from the
/// sniffed format. Name clashes get `-1`, `-2`, ... suffixes; existing
/// files are never overwritten.
pub fn extract_media(nb: &Notebook, dir: &Path) -> Result<Manifest, ExtractError> {
    check_dir(dir)?;
    let mut planned = Vec::new();
    for (i, site) in nb.websites.iter().enumerate() {
        for img in &site.images {
            planned.push(Planned {
                stem: format!("{}-{}", i + 1, sanitize_file_name(&img.name)),
                ext: sniff_format(&img.full.payload).extension(),
                website: i + 1,
                record: &img.name,
                bytes: &img.full.payload,
            });
        }
    }
    write_all(dir, planned, |ext| {
        match ext {
            "jpg" => "jpeg",
            "bin" => "unknown",
            other => other,
        }
        .to_owned()
    })
}

/// Writes each dataset's content as UTF-8, named like [`extract_media`]
/// with extension `.xml` when the content looks like markup, else `.txt`.
pub fn extract_datasets(nb: &Notebook, dir: &Path) -> Result<Manifest, ExtractError> {
    check_dir(dir)?;
    let mut planned = Vec::new();
    for (i, site) in nb.websites.iter().enumerate() {
        for ds in &site.datasets {
            let xml = ds.content.trim_start().starts_with('<');
            planned.push(Planned {
                stem: format!("{}-{}", i + 1, sanitize_file_name(&ds.name)),
                ext: if xml { "xml" } else { "txt" },
                website: i + 1,
                record: &ds.name,
                bytes: ds.content.as_bytes(),
            });
        }
    }
    write_all(dir, planned, |ext| if ext == "xml" { "xml" } else { "text" }.to_owned())
}
