use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::model::{Notebook, WebsiteEntry};

/// How entries sharing a `(name, location)` key are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MergePolicy {
    /// Keep every entry from both sides.
    #[default]
    KeepBoth,
    /// Drop entries of the second notebook whose key occurs in the first.
    PreferFirst,
    /// Drop entries of the first notebook whose key occurs in the second.
    PreferSecond,
}

impl FromStr for MergePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "both" => Ok(MergePolicy::KeepBoth),
            "first" => Ok(MergePolicy::PreferFirst),
            "second" => Ok(MergePolicy::PreferSecond),
            _ => Err(format!("unknown merge policy {s:?} (expected first, second or both)")),
        }
    }
}

impl fmt::Display for MergePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MergePolicy::KeepBoth => "both",
            MergePolicy::PreferFirst => "first",
            MergePolicy::PreferSecond => "second",
        })
    }
}

/// Entries of `a` then entries of `b`, minus the losing side of each key
/// collision. The schema location of `a` wins when both carry one.
pub fn merge(a: &Notebook, b: &Notebook, policy: MergePolicy) -> Notebook {
    fn keys(nb: &Notebook) -> HashSet<(&str, &str)> {
        nb.websites.iter().map(WebsiteEntry::key).collect()
    }
    let (ka, kb) = (keys(a), keys(b));
    let from_a = a
        .websites
        .iter()
        .filter(|w| policy != MergePolicy::PreferSecond || !kb.contains(&w.key()));
    let from_b = b
        .websites
        .iter()
        .filter(|w| policy != MergePolicy::PreferFirst || !ka.contains(&w.key()));
    Notebook {
        websites: from_a.chain(from_b).cloned().collect(),
        schema_location: a.schema_location.clone().or_else(|| b.schema_location.clone()),
    }
}
