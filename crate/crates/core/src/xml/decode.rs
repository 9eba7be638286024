use std::io::Read;

use super::{is_xml_whitespace, Event, ParseError, ParseErrorKind, Position, StartTag, XmlError, XmlReader, XSI_NAMESPACE};
use crate::media::decode_data_uri;
use crate::model::{
    Contact, Dataset, Date, ImageRecord, MediaBlob, Notebook, Note, RelatedUrl, TodoItem, VideoRecord, WebsiteEntry,
    SLN_NAMESPACE,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Skip unknown elements, unknown attributes and stray text instead of
    /// failing.
    pub lenient: bool,
}

/// Reads a whole document into a [`Notebook`] in a single forward pass.
pub fn parse_notebook<R: Read>(source: R) -> Result<Notebook, XmlError> {
    parse_notebook_with(source, ParseOptions::default())
}

pub fn parse_notebook_slice(source: &[u8]) -> Result<Notebook, XmlError> {
    parse_notebook(source)
}

pub fn parse_notebook_with<R: Read>(source: R, options: ParseOptions) -> Result<Notebook, XmlError> {
    let mut d = Decoder {
        reader: XmlReader::new(source),
        lenient: options.lenient,
    };
    let nb = d.notebook()?;
    while d.reader.next_event()?.is_some() {}
    Ok(nb)
}

enum Step {
    Child(StartTag),
    End,
}

type Res<T> = Result<T, XmlError>;

fn err(kind: ParseErrorKind, at: Position, detail: impl Into<String>) -> XmlError {
    ParseError::new(kind, at, detail).into()
}

struct Decoder<R> {
    reader: XmlReader<R>,
    lenient: bool,
}

impl<R: Read> Decoder<R> {
    fn notebook(&mut self) -> Res<Notebook> {
        let root = match self.reader.next_event()? {
            Some(Event::Start(tag)) => tag,
            _ => return Err(err(ParseErrorKind::NotWellFormed, self.reader.position(), "no root element")),
        };
        if !root.is(SLN_NAMESPACE, "sln") {
            let ns = root.namespace.as_deref().unwrap_or("no namespace");
            return Err(err(
                ParseErrorKind::WrongRootNamespace,
                root.position,
                format!("root is <{}> in {ns}; expected <sln> in {SLN_NAMESPACE}", root.local),
            ));
        }
        let mut schema_location = None;
        for a in &root.attributes {
            if a.namespace.as_deref() == Some(XSI_NAMESPACE) && a.local == "schemaLocation" {
                schema_location = Some(a.value.clone());
            } else if !self.lenient {
                return Err(err(
                    ParseErrorKind::BadAttribute,
                    root.position,
                    format!("unexpected attribute {:?} on <sln>", a.local),
                ));
            }
        }
        let mut websites = Vec::new();
        while let Step::Child(child) = self.next_child()? {
            if self.is_ours(&child, "website")? {
                websites.push(self.website(child)?);
            }
        }
        Ok(Notebook {
            websites,
            schema_location,
        })
    }

    fn next_child(&mut self) -> Res<Step> {
        loop {
            match self.reader.next_event()? {
                Some(Event::Start(tag)) => return Ok(Step::Child(tag)),
                Some(Event::End(_)) => return Ok(Step::End),
                Some(Event::Text(t)) => {
                    if !is_xml_whitespace(t) && !self.lenient {
                        return Err(err(
                            ParseErrorKind::UnknownElement,
                            self.reader.text_position(),
                            "unexpected character data",
                        ));
                    }
                }
                None => return Err(err(ParseErrorKind::NotWellFormed, self.reader.position(), "unexpected end")),
            }
        }
    }

    /// Text content of a leaf element; consumes its end tag.
    fn text(&mut self, tag: &StartTag) -> Res<String> {
        self.no_attributes(tag)?;
        let mut out = String::new();
        loop {
            match self.reader.next_event()? {
                Some(Event::Text(t)) => out.push_str(t),
                Some(Event::End(_)) => return Ok(out),
                Some(Event::Start(child)) => {
                    if !self.lenient {
                        return Err(err(
                            ParseErrorKind::UnknownElement,
                            child.position,
                            format!("<{}> is not allowed inside <{}>", child.local, tag.local),
                        ));
                    }
                    self.skip()?;
                }
                None => return Err(err(ParseErrorKind::NotWellFormed, self.reader.position(), "unexpected end")),
            }
        }
    }

    /// Consumes the rest of the element whose start tag was just read.
    fn skip(&mut self) -> Res<()> {
        let mut depth = 1usize;
        while depth > 0 {
            match self.reader.next_event()? {
                Some(Event::Start(_)) => depth += 1,
                Some(Event::End(_)) => depth -= 1,
                Some(Event::Text(_)) => {}
                None => return Err(err(ParseErrorKind::NotWellFormed, self.reader.position(), "unexpected end")),
            }
        }
        Ok(())
    }

    /// Whether `tag` is `<expected>` in the SLN namespace. Anything else is
    /// an error, or skipped in lenient mode.
    fn is_ours(&mut self, tag: &StartTag, expected: &str) -> Res<bool> {
        if tag.namespace.as_deref() == Some(SLN_NAMESPACE) && tag.local == expected {
            return Ok(true);
        }
        self.unknown(tag)?;
        Ok(false)
    }

    fn unknown(&mut self, tag: &StartTag) -> Res<()> {
        if self.lenient {
            return self.skip();
        }
        let detail = match tag.namespace.as_deref() {
            Some(SLN_NAMESPACE) => format!("unexpected element <{}>", tag.local),
            Some(ns) => format!("unexpected element <{}> in namespace {ns}", tag.local),
            None => format!("unexpected element <{}> without namespace", tag.local),
        };
        Err(err(ParseErrorKind::UnknownElement, tag.position, detail))
    }

    /// Next SLN-namespace child, with unknown elements rejected or skipped.
    fn next_own_child(&mut self) -> Res<Option<StartTag>> {
        loop {
            match self.next_child()? {
                Step::End => return Ok(None),
                Step::Child(tag) if tag.namespace.as_deref() == Some(SLN_NAMESPACE) => return Ok(Some(tag)),
                Step::Child(tag) => self.unknown(&tag)?,
            }
        }
    }

    fn allow_attributes(&self, tag: &StartTag, allowed: &[&str]) -> Res<()> {
        if self.lenient {
            return Ok(());
        }
        match tag
            .attributes
            .iter()
            .find(|a| a.namespace.is_some() || !allowed.contains(&a.local.as_str()))
        {
            Some(a) => Err(err(
                ParseErrorKind::BadAttribute,
                tag.position,
                format!("unexpected attribute {:?} on <{}>", a.local, tag.local),
            )),
            None => Ok(()),
        }
    }

    fn no_attributes(&self, tag: &StartTag) -> Res<()> {
        self.allow_attributes(tag, &[])
    }

    fn required(&self, tag: &StartTag, name: &str) -> Res<String> {
        tag.attr(name).map(str::to_owned).ok_or_else(|| {
            err(
                ParseErrorKind::BadAttribute,
                tag.position,
                format!("<{}> lacks required attribute {name:?}", tag.local),
            )
        })
    }

    fn required_name(&self, tag: &StartTag, name: &str) -> Res<String> {
        let value = self.required(tag, name)?;
        if value.is_empty() {
            return Err(err(
                ParseErrorKind::BadAttribute,
                tag.position,
                format!("attribute {name:?} of <{}> is empty", tag.local),
            ));
        }
        Ok(value)
    }

    fn group<T>(&mut self, tag: &StartTag, item: &str, out: &mut Vec<T>, each: fn(&mut Self, StartTag) -> Res<T>) -> Res<()> {
        self.no_attributes(tag)?;
        while let Some(child) = self.next_own_child()? {
            if child.local == item {
                out.push(each(self, child)?);
            } else {
                self.unknown(&child)?;
            }
        }
        Ok(())
    }

    fn website(&mut self, tag: StartTag) -> Res<WebsiteEntry> {
        self.allow_attributes(&tag, &["name", "location"])?;
        let name = self.required_name(&tag, "name")?;
        let location = self.required(&tag, "location")?;
        let mut purpose = None;
        let mut date = None;
        let mut seen: Vec<String> = Vec::new();
        let (mut related, mut contacts, mut datasets, mut images, mut videos, mut todos, mut notes) =
            (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
        while let Some(child) = self.next_own_child()? {
            let known = matches!(
                child.local.as_str(),
                "purpose" | "date" | "related" | "contacts" | "datasets" | "images" | "videos" | "todos" | "othernotes"
            );
            if known {
                if seen.contains(&child.local) {
                    return Err(duplicate(&child));
                }
                seen.push(child.local.clone());
            }
            match child.local.as_str() {
                "purpose" => purpose = Some(self.text(&child)?),
                "date" => date = Some(self.date(&child)?),
                "related" => self.group(&child, "reluri", &mut related, Self::related_url)?,
                "contacts" => self.group(&child, "contact", &mut contacts, Self::contact)?,
                "datasets" => self.group(&child, "dataset", &mut datasets, Self::dataset)?,
                "images" => self.group(&child, "image", &mut images, Self::image)?,
                "videos" => self.group(&child, "video", &mut videos, Self::video)?,
                "todos" => self.group(&child, "todo", &mut todos, Self::todo)?,
                "othernotes" => self.group(&child, "note", &mut notes, Self::note)?,
                _ => self.unknown(&child)?,
            }
        }
        let entry = WebsiteEntry {
            name,
            location,
            purpose: purpose.ok_or_else(|| missing(&tag, "purpose"))?,
            date: date.ok_or_else(|| missing(&tag, "date"))?,
            related,
            contacts,
            datasets,
            images,
            videos,
            todos,
            other_notes: notes,
        };
        entry
            .validate()
            .map_err(|e| err(ParseErrorKind::InvalidValue, tag.position, e.to_string()))?;
        Ok(entry)
    }

    fn date(&mut self, tag: &StartTag) -> Res<Date> {
        let text = self.text(tag)?;
        text.parse()
            .map_err(|e: crate::model::ModelError| err(ParseErrorKind::InvalidValue, tag.position, e.to_string()))
    }

    /// Reads the children named in `fields` (each at most once) as text.
    fn fields<const N: usize>(&mut self, tag: &StartTag, fields: [&str; N]) -> Res<[Option<String>; N]> {
        let mut out: [Option<String>; N] = std::array::from_fn(|_| None);
        while let Some(child) = self.next_own_child()? {
            match fields.iter().position(|f| *f == child.local) {
                Some(i) if out[i].is_some() => return Err(duplicate(&child)),
                Some(i) => out[i] = Some(self.text(&child)?),
                None => self.unknown(&child)?,
            }
        }
        let _ = tag;
        Ok(out)
    }

    fn related_url(&mut self, tag: StartTag) -> Res<RelatedUrl> {
        self.allow_attributes(&tag, &["value"])?;
        let value = self.required_name(&tag, "value")?;
        let [notes] = self.fields(&tag, ["notes"])?;
        Ok(RelatedUrl {
            value,
            notes: notes.ok_or_else(|| missing(&tag, "notes"))?,
        })
    }

    fn contact(&mut self, tag: StartTag) -> Res<Contact> {
        self.allow_attributes(&tag, &["name", "surname"])?;
        let name = self.required_name(&tag, "name")?;
        let surname = self.required_name(&tag, "surname")?;
        let [email, webpage, notes] = self.fields(&tag, ["email", "webpage", "notes"])?;
        Ok(Contact {
            name,
            surname,
            email: email.ok_or_else(|| missing(&tag, "email"))?,
            webpage: webpage.ok_or_else(|| missing(&tag, "webpage"))?,
            notes: notes.ok_or_else(|| missing(&tag, "notes"))?,
        })
    }

    fn dataset(&mut self, tag: StartTag) -> Res<Dataset> {
        self.allow_attributes(&tag, &["name"])?;
        let name = self.required_name(&tag, "name")?;
        let [notes, content] = self.fields(&tag, ["notes", "content"])?;
        Ok(Dataset {
            name,
            notes: notes.ok_or_else(|| missing(&tag, "notes"))?,
            content: content.ok_or_else(|| missing(&tag, "content"))?,
        })
    }

    fn blob(&mut self, tag: &StartTag) -> Res<MediaBlob> {
        let text = self.text(tag)?;
        let (media_type, payload) =
            decode_data_uri(&text).map_err(|e| err(ParseErrorKind::InvalidValue, tag.position, e.to_string()))?;
        Ok(MediaBlob { media_type, payload })
    }

    fn sized_blob(&mut self, tag: &StartTag) -> Res<(MediaBlob, u32, u32)> {
        self.allow_attributes(tag, &["width", "height"])?;
        let dim = |name: &str| -> Res<u32> {
            let v = self.required(tag, name)?;
            v.parse::<u32>().map_err(|_| {
                err(
                    ParseErrorKind::InvalidValue,
                    tag.position,
                    format!("{name} {v:?} of <{}> is not a pixel count", tag.local),
                )
            })
        };
        let (width, height) = (dim("width")?, dim("height")?);
        let mut blob = None;
        while let Some(child) = self.next_own_child()? {
            match child.local.as_str() {
                "data" if blob.is_some() => return Err(duplicate(&child)),
                "data" => blob = Some(self.blob(&child)?),
                _ => self.unknown(&child)?,
            }
        }
        Ok((blob.ok_or_else(|| missing(tag, "data"))?, width, height))
    }

    fn image(&mut self, tag: StartTag) -> Res<ImageRecord> {
        self.allow_attributes(&tag, &["name", "url"])?;
        let name = self.required_name(&tag, "name")?;
        let related_url = tag.attr("url").map(str::to_owned);
        let mut notes = None;
        let mut full = None;
        let mut thumb = None;
        while let Some(child) = self.next_own_child()? {
            let slot_taken = match child.local.as_str() {
                "notes" => notes.is_some(),
                "full" => full.is_some(),
                "thumbnail" => thumb.is_some(),
                _ => false,
            };
            if slot_taken {
                return Err(duplicate(&child));
            }
            match child.local.as_str() {
                "notes" => notes = Some(self.text(&child)?),
                "full" => full = Some(self.sized_blob(&child)?),
                "thumbnail" => thumb = Some(self.sized_blob(&child)?),
                _ => self.unknown(&child)?,
            }
        }
        let (full, full_width, full_height) = full.ok_or_else(|| missing(&tag, "full"))?;
        let (thumbnail, thumb_width, thumb_height) = thumb.ok_or_else(|| missing(&tag, "thumbnail"))?;
        Ok(ImageRecord {
            name,
            notes: notes.ok_or_else(|| missing(&tag, "notes"))?,
            related_url,
            full,
            thumbnail,
            full_width,
            full_height,
            thumb_width,
            thumb_height,
        })
    }

    fn video(&mut self, tag: StartTag) -> Res<VideoRecord> {
        self.allow_attributes(&tag, &["name"])?;
        let name = self.required_name(&tag, "name")?;
        let mut notes = None;
        let mut media = None;
        while let Some(child) = self.next_own_child()? {
            match child.local.as_str() {
                "notes" if notes.is_some() => return Err(duplicate(&child)),
                "notes" => notes = Some(self.text(&child)?),
                "data" if media.is_some() => return Err(duplicate(&child)),
                "data" => media = Some(self.blob(&child)?),
                _ => self.unknown(&child)?,
            }
        }
        Ok(VideoRecord {
            name,
            notes: notes.ok_or_else(|| missing(&tag, "notes"))?,
            media,
        })
    }

    fn todo(&mut self, tag: StartTag) -> Res<TodoItem> {
        self.allow_attributes(&tag, &["done", "due"])?;
        let invalid = |d: String| err(ParseErrorKind::InvalidValue, tag.position, d);
        let done = match tag.attr("done") {
            None | Some("false") | Some("0") => false,
            Some("true") | Some("1") => true,
            Some(other) => return Err(invalid(format!("done {other:?} is not a boolean"))),
        };
        let due_date = tag
            .attr("due")
            .map(|d| d.parse::<Date>())
            .transpose()
            .map_err(|e| invalid(e.to_string()))?;
        let [text] = self.fields(&tag, ["text"])?;
        Ok(TodoItem {
            text: text.ok_or_else(|| missing(&tag, "text"))?,
            due_date,
            done,
        })
    }

    fn note(&mut self, tag: StartTag) -> Res<Note> {
        Ok(Note { text: self.text(&tag)? })
    }
}

fn missing(parent: &StartTag, child: &str) -> XmlError {
    err(
        ParseErrorKind::MissingElement,
        parent.position,
        format!("<{}> lacks required <{child}>", parent.local),
    )
}

fn duplicate(tag: &StartTag) -> XmlError {
    err(ParseErrorKind::UnknownElement, tag.position, format!("unexpected second <{}>", tag.local))
}
