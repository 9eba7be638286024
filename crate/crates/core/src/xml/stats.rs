use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{Event, ParseError, ParseErrorKind, XmlError, XmlReader};
use crate::media::DataUriScanner;
use crate::model::SLN_NAMESPACE;

/// Summary counts gathered in one streaming pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamStats {
    pub website_count: u64,
    /// UTF-8 bytes of dataset content after entity expansion.
    pub dataset_bytes: u64,
    pub image_count: u64,
    /// Decoded payload bytes across every embedded data URI.
    pub total_media_bytes: u64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Website,
    Dataset,
    Content,
    Image,
    Data,
    Other,
}

/// Scans a document without building a notebook. Memory stays bounded by
/// nesting depth regardless of payload sizes.
pub fn stream_stats<R: Read>(source: R) -> Result<StreamStats, XmlError> {
    let mut reader = XmlReader::new(source);
    let mut stats = StreamStats::default();
    let mut stack: Vec<Slot> = Vec::new();
    let mut scanner: Option<DataUriScanner> = None;
    while let Some(event) = reader.next_event()? {
        match event {
            Event::Start(tag) => {
                if stack.is_empty() && !tag.is(SLN_NAMESPACE, "sln") {
                    return Err(ParseError::new(
                        ParseErrorKind::WrongRootNamespace,
                        tag.position,
                        format!("root is <{}>; expected <sln> in {SLN_NAMESPACE}", tag.local),
                    )
                    .into());
                }
                let ours = tag.namespace.as_deref() == Some(SLN_NAMESPACE);
                let parent = stack.last().copied();
                let slot = match (ours, tag.local.as_str(), parent) {
                    (true, "website", _) => Slot::Website,
                    (true, "dataset", _) => Slot::Dataset,
                    (true, "content", Some(Slot::Dataset)) => Slot::Content,
                    (true, "image", _) => Slot::Image,
                    (true, "data", _) => Slot::Data,
                    _ => Slot::Other,
                };
                match slot {
                    Slot::Website => stats.website_count += 1,
                    Slot::Image => stats.image_count += 1,
                    Slot::Data => scanner = Some(DataUriScanner::new()),
                    _ => {}
                }
                stack.push(slot);
            }
            Event::Text(text) => match stack.last() {
                Some(Slot::Content) => stats.dataset_bytes += text.len() as u64,
                Some(Slot::Data) => {
                    if let Some(s) = scanner.as_mut() {
                        s.feed(text);
                    }
                }
                _ => {}
            },
            Event::End(end) => {
                if stack.pop() == Some(Slot::Data) {
                    let bytes = scanner.take().map(|s| s.finish()).transpose().map_err(|detail| {
                        ParseError::new(ParseErrorKind::InvalidValue, end.position, detail)
                    })?;
                    stats.total_media_bytes += bytes.unwrap_or(0);
                }
            }
        }
    }
    Ok(stats)
}
