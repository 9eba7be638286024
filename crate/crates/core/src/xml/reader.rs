use std::io::{self, Read};

use memchr::{memchr, memchr2, memmem};

use super::{ParseError, ParseErrorKind, Position, XmlError, XML_NAMESPACE};
use crate::text::{is_name_char, is_name_start, is_xml_char};

/// Upper bound on the size of a single [`Event::Text`] chunk.
pub const TEXT_CHUNK: usize = 64 * 1024;

const READ_SIZE: usize = 64 * 1024;
const MAX_REFERENCE: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub local: String,
    pub namespace: Option<String>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StartTag {
    pub local: String,
    pub namespace: Option<String>,
    pub attributes: Vec<Attribute>,
    pub position: Position,
}

impl StartTag {
    /// Value of the unqualified attribute `local`.
    pub fn attr(&self, local: &str) -> Option<&str> {
        self.attributes
            .iter()
            .find(|a| a.namespace.is_none() && a.local == local)
            .map(|a| a.value.as_str())
    }

    pub fn is(&self, namespace: &str, local: &str) -> bool {
        self.namespace.as_deref() == Some(namespace) && self.local == local
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndTag {
    pub local: String,
    pub namespace: Option<String>,
    pub position: Position,
}

#[derive(Debug, PartialEq, Eq)]
pub enum Event<'a> {
    Start(StartTag),
    End(EndTag),
    /// Unescaped character data. One text node may arrive as several
    /// consecutive chunks.
    Text(&'a str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Start,
    Prolog,
    Content,
    Epilog,
}

struct OpenElement {
    raw_name: String,
    local: String,
    namespace: Option<String>,
    bindings: usize,
}

enum Produced {
    Start(StartTag),
    End(EndTag),
    Text,
}

/// Streaming, namespace-aware XML 1.0 reader restricted to UTF-8 input.
///
/// DTDs are rejected; only the five predefined entities and character
/// references are recognised. Comments and processing instructions are
/// checked for termination and skipped.
pub struct XmlReader<R> {
    src: R,
    buf: Vec<u8>,
    pos: usize,
    len: usize,
    eof: bool,
    at: Position,
    state: State,
    stack: Vec<OpenElement>,
    bindings: Vec<(String, Option<String>)>,
    pending_end: Option<EndTag>,
    in_cdata: bool,
    text: String,
    text_at: Position,
}

impl<R: Read> XmlReader<R> {
    pub fn new(src: R) -> Self {
        XmlReader {
            src,
            buf: Vec::new(),
            pos: 0,
            len: 0,
            eof: false,
            at: Position { line: 1, column: 1 },
            state: State::Start,
            stack: Vec::new(),
            bindings: Vec::new(),
            pending_end: None,
            in_cdata: false,
            text: String::new(),
            text_at: Position::default(),
        }
    }

    /// Current read position (start of the next construct).
    pub fn position(&self) -> Position {
        self.at
    }

    /// Start position of the most recent text chunk.
    pub fn text_position(&self) -> Position {
        self.text_at
    }

    /// Number of currently open elements.
    pub fn depth(&self) -> usize {
        self.stack.len()
    }

    /// Next event, or `None` once the root element is closed and the rest of
    /// the input has been checked.
    pub fn next_event(&mut self) -> Result<Option<Event<'_>>, XmlError> {
        let produced = match self.pending_end.take() {
            Some(end) => Some(Produced::End(end)),
            None => self.advance_event()?,
        };
        Ok(produced.map(|p| match p {
            Produced::Start(s) => Event::Start(s),
            Produced::End(e) => Event::End(e),
            Produced::Text => Event::Text(&self.text),
        }))
    }

    fn advance_event(&mut self) -> Result<Option<Produced>, XmlError> {
        loop {
            match self.state {
                State::Start => {
                    self.read_declaration()?;
                    self.state = State::Prolog;
                }
                State::Prolog | State::Epilog => {
                    if !self.skip_whitespace()? {
                        if self.state == State::Prolog {
                            return Err(self.error(ParseErrorKind::NotWellFormed, "no root element").into());
                        }
                        return Ok(None);
                    }
                    if let Some(p) = self.read_markup()? {
                        return Ok(Some(p));
                    }
                }
                State::Content => {
                    if self.in_cdata {
                        self.read_cdata()?;
                        if !self.text.is_empty() {
                            return Ok(Some(Produced::Text));
                        }
                        continue;
                    }
                    if !self.ensure(1)? {
                        let open = self.stack.last().map(|e| e.raw_name.clone()).unwrap_or_default();
                        return Err(self
                            .error(ParseErrorKind::NotWellFormed, format!("document ends inside <{open}>"))
                            .into());
                    }
                    if self.buf[self.pos] == b'<' {
                        if let Some(p) = self.read_markup()? {
                            return Ok(Some(p));
                        }
                    } else {
                        self.read_text()?;
                        if !self.text.is_empty() {
                            return Ok(Some(Produced::Text));
                        }
                    }
                }
            }
        }
    }

    fn error(&self, kind: ParseErrorKind, detail: impl Into<String>) -> ParseError {
        ParseError::new(kind, self.at, detail)
    }

    fn avail(&self) -> &[u8] {
        &self.buf[self.pos..self.len]
    }

    /// Reads more input, compacting the buffer first. Returns `false` at EOF.
    fn fill(&mut self) -> io::Result<bool> {
        if self.eof {
            return Ok(false);
        }
        if self.pos > 0 {
            self.buf.copy_within(self.pos..self.len, 0);
            self.len -= self.pos;
            self.pos = 0;
        }
        if self.buf.len() - self.len < READ_SIZE {
            self.buf.resize(self.len + READ_SIZE, 0);
        }
        loop {
            match self.src.read(&mut self.buf[self.len..]) {
                Ok(0) => {
                    self.eof = true;
                    return Ok(false);
                }
                Ok(n) => {
                    self.len += n;
                    return Ok(true);
                }
                Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                Err(e) => return Err(e),
            }
        }
    }

    fn ensure(&mut self, n: usize) -> io::Result<bool> {
        while self.len - self.pos < n {
            if !self.fill()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn advance(&mut self, n: usize) {
        let consumed = &self.buf[self.pos..self.pos + n];
        match memchr::memrchr(b'\n', consumed) {
            Some(last) => {
                self.at.line += memchr::memchr_iter(b'\n', consumed).count() as u64;
                self.at.column = (n - last) as u64;
            }
            None => self.at.column += n as u64,
        }
        self.pos += n;
    }

    /// Offset (from `pos`) of the first occurrence of `pattern` at or after
    /// `skip`, buffering input as needed.
    fn find(&mut self, skip: usize, pattern: &[u8]) -> io::Result<Option<usize>> {
        let mut searched = skip;
        loop {
            if self.pos + searched <= self.len {
                if let Some(i) = memmem::find(&self.buf[self.pos + searched..self.len], pattern) {
                    return Ok(Some(searched + i));
                }
                searched = (self.len - self.pos).saturating_sub(pattern.len() - 1).max(skip);
            }
            if !self.fill()? {
                return Ok(None);
            }
        }
    }

    fn starts_with(&mut self, prefix: &[u8]) -> io::Result<bool> {
        self.ensure(prefix.len())?;
        Ok(self.avail().starts_with(prefix))
    }

    fn read_declaration(&mut self) -> Result<(), XmlError> {
        self.ensure(4)?;
        let head = self.avail();
        if head.starts_with(&[0xFE, 0xFF])
            || head.starts_with(&[0xFF, 0xFE])
            || head.starts_with(&[0x00, b'<'])
            || head.starts_with(&[b'<', 0x00])
        {
            return Err(self.error(ParseErrorKind::BadEncoding, "UTF-16 input is not supported").into());
        }
        if head.starts_with(&[0xEF, 0xBB, 0xBF]) {
            self.pos += 3;
        }
        self.ensure(6)?;
        let a = self.avail();
        if !(a.len() >= 6 && a.starts_with(b"<?xml") && matches!(a[5], b' ' | b'\t' | b'\r' | b'\n')) {
            return Ok(());
        }
        let start = self.at;
        let Some(end) = self.find(5, b"?>")? else {
            return Err(self.error(ParseErrorKind::NotWellFormed, "unterminated XML declaration").into());
        };
        let body = std::str::from_utf8(&self.buf[self.pos + 5..self.pos + end])
            .map_err(|_| ParseError::new(ParseErrorKind::BadEncoding, start, "XML declaration is not UTF-8"))?
            .to_owned();
        let attrs = parse_attributes(&body)
            .map_err(|d| ParseError::new(ParseErrorKind::NotWellFormed, start, format!("XML declaration: {d}")))?;
        let mut version = None;
        for (name, value) in &attrs {
            match name.as_str() {
                "version" => version = Some(value.clone()),
                "encoding" => {
                    if !value.eq_ignore_ascii_case("utf-8") {
                        return Err(ParseError::new(
                            ParseErrorKind::BadEncoding,
                            start,
                            format!("declared encoding {value:?}; only utf-8 is supported"),
                        )
                        .into());
                    }
                }
                "standalone" => {}
                other => {
                    return Err(ParseError::new(
                        ParseErrorKind::NotWellFormed,
                        start,
                        format!("unexpected {other:?} in XML declaration"),
                    )
                    .into())
                }
            }
        }
        match version.as_deref() {
            Some("1.0") => {}
            Some(v) => {
                return Err(ParseError::new(
                    ParseErrorKind::NotWellFormed,
                    start,
                    format!("XML version {v} is not supported"),
                )
                .into())
            }
            None => {
                return Err(ParseError::new(ParseErrorKind::NotWellFormed, start, "XML declaration lacks a version").into())
            }
        }
        self.advance(end + 2);
        Ok(())
    }

    /// Skips whitespace outside the root element. Returns `false` at EOF.
    fn skip_whitespace(&mut self) -> Result<bool, XmlError> {
        loop {
            let avail = self.avail();
            let n = avail.iter().take_while(|b| matches!(b, b' ' | b'\t' | b'\r' | b'\n')).count();
            let exhausted = n == avail.len();
            self.advance(n);
            if !exhausted {
                if self.buf[self.pos] != b'<' {
                    return Err(self.error(ParseErrorKind::NotWellFormed, "text outside the root element").into());
                }
                return Ok(true);
            }
            if !self.fill()? {
                return Ok(false);
            }
        }
    }

    /// Handles one markup construct at `<`. Returns an event for tags, or
    /// `None` for skipped constructs.
    fn read_markup(&mut self) -> Result<Option<Produced>, XmlError> {
        if self.starts_with(b"<!--")? {
            let Some(end) = self.find(4, b"-->")? else {
                return Err(self.error(ParseErrorKind::NotWellFormed, "unterminated comment").into());
            };
            self.advance(end + 3);
            return Ok(None);
        }
        if self.starts_with(b"<?")? {
            let Some(end) = self.find(2, b"?>")? else {
                return Err(self.error(ParseErrorKind::NotWellFormed, "unterminated processing instruction").into());
            };
            let target: Vec<u8> = self.buf[self.pos + 2..self.pos + end]
                .iter()
                .take_while(|b| !matches!(b, b' ' | b'\t' | b'\r' | b'\n'))
                .copied()
                .collect();
            if target.eq_ignore_ascii_case(b"xml") {
                return Err(self.error(ParseErrorKind::NotWellFormed, "misplaced XML declaration").into());
            }
            self.advance(end + 2);
            return Ok(None);
        }
        if self.starts_with(b"<!DOCTYPE")? {
            return Err(self.error(ParseErrorKind::NotWellFormed, "document type declarations are not supported").into());
        }
        if self.starts_with(b"<![CDATA[")? {
            if self.state != State::Content {
                return Err(self.error(ParseErrorKind::NotWellFormed, "CDATA outside the root element").into());
            }
            self.advance(9);
            self.in_cdata = true;
            return Ok(None);
        }
        if self.starts_with(b"</")? {
            return self.read_end_tag().map(Some);
        }
        if self.state == State::Epilog {
            return Err(self.error(ParseErrorKind::NotWellFormed, "content after the root element").into());
        }
        self.read_start_tag().map(Some)
    }

    fn tag_end(&mut self) -> io::Result<Option<usize>> {
        let mut i = 1;
        let mut quote = None;
        loop {
            while self.pos + i < self.len {
                let b = self.buf[self.pos + i];
                match quote {
                    Some(q) if b == q => quote = None,
                    Some(_) => {}
                    None => match b {
                        b'"' | b'\'' => quote = Some(b),
                        b'>' => return Ok(Some(i)),
                        _ => {}
                    },
                }
                i += 1;
            }
            if !self.fill()? {
                return Ok(None);
            }
        }
    }

    fn read_start_tag(&mut self) -> Result<Produced, XmlError> {
        let start = self.at;
        let wf = |d: String| ParseError::new(ParseErrorKind::NotWellFormed, start, d);
        let Some(end) = self.tag_end()? else {
            return Err(wf("unterminated start tag".into()).into());
        };
        let raw = &self.buf[self.pos + 1..self.pos + end];
        let (raw, empty) = match raw.last() {
            Some(b'/') => (&raw[..raw.len() - 1], true),
            _ => (raw, false),
        };
        let tag = std::str::from_utf8(raw)
            .map_err(|_| ParseError::new(ParseErrorKind::BadEncoding, start, "tag is not valid UTF-8"))?;
        let name_len = tag.find(|c: char| !is_name_char(c)).unwrap_or(tag.len());
        let raw_name = &tag[..name_len];
        if !raw_name.starts_with(is_name_start) {
            return Err(wf(format!("invalid element name {raw_name:?}")).into());
        }
        let rest = &tag[name_len..];
        if !rest.is_empty() && !rest.starts_with([' ', '\t', '\r', '\n']) {
            return Err(wf(format!("invalid element name {tag:?}")).into());
        }
        let attrs = parse_attributes(rest).map_err(|d| wf(format!("<{raw_name}>: {d}")))?;
        let raw_name = raw_name.to_owned();
        self.advance(end + 1);

        let mut bindings = 0;
        let mut plain = Vec::with_capacity(attrs.len());
        for (name, value) in attrs {
            if name == "xmlns" {
                self.bindings.push((String::new(), (!value.is_empty()).then_some(value)));
                bindings += 1;
            } else if let Some(prefix) = name.strip_prefix("xmlns:") {
                if value.is_empty() {
                    return Err(wf(format!("namespace prefix {prefix:?} bound to an empty URI")).into());
                }
                self.bindings.push((prefix.to_owned(), Some(value)));
                bindings += 1;
            } else {
                plain.push((name, value));
            }
        }
        let (prefix, local) = split_qname(&raw_name).ok_or_else(|| wf(format!("invalid qualified name {raw_name:?}")))?;
        let namespace = self
            .resolve(prefix, true)
            .map_err(|p| wf(format!("unbound namespace prefix {p:?}")))?;
        let mut attributes: Vec<Attribute> = Vec::with_capacity(plain.len());
        for (name, value) in plain {
            let (prefix, local) = split_qname(&name).ok_or_else(|| wf(format!("invalid attribute name {name:?}")))?;
            let namespace = match prefix {
                Some(_) => self.resolve(prefix, false).map_err(|p| wf(format!("unbound namespace prefix {p:?}")))?,
                None => None,
            };
            if attributes.iter().any(|a| a.local == local && a.namespace == namespace) {
                return Err(wf(format!("duplicate attribute {name:?}")).into());
            }
            attributes.push(Attribute {
                local: local.to_owned(),
                namespace,
                value,
            });
        }
        let local = local.to_owned();
        if self.state == State::Prolog {
            self.state = State::Content;
        }
        let tag = StartTag {
            local: local.clone(),
            namespace: namespace.clone(),
            attributes,
            position: start,
        };
        if empty {
            self.bindings.truncate(self.bindings.len() - bindings);
            if self.stack.is_empty() {
                self.state = State::Epilog;
            }
            self.pending_end = Some(EndTag {
                local,
                namespace,
                position: start,
            });
        } else {
            self.stack.push(OpenElement {
                raw_name,
                local,
                namespace,
                bindings,
            });
        }
        Ok(Produced::Start(tag))
    }

    fn resolve(&self, prefix: Option<&str>, use_default: bool) -> Result<Option<String>, String> {
        let key = match prefix {
            Some("xml") => return Ok(Some(XML_NAMESPACE.to_owned())),
            Some(p) => p,
            None if use_default => "",
            None => return Ok(None),
        };
        match self.bindings.iter().rev().find(|(p, _)| p == key) {
            Some((_, uri)) => Ok(uri.clone()),
            None if key.is_empty() => Ok(None),
            None => Err(key.to_owned()),
        }
    }

    fn read_end_tag(&mut self) -> Result<Produced, XmlError> {
        let start = self.at;
        let Some(end) = self.find(2, b">")? else {
            return Err(self.error(ParseErrorKind::NotWellFormed, "unterminated end tag").into());
        };
        let raw = std::str::from_utf8(&self.buf[self.pos + 2..self.pos + end])
            .map_err(|_| ParseError::new(ParseErrorKind::BadEncoding, start, "tag is not valid UTF-8"))?;
        let name = raw.trim_end_matches([' ', '\t', '\r', '\n']);
        let Some(open) = self.stack.pop() else {
            return Err(ParseError::new(ParseErrorKind::NotWellFormed, start, format!("unexpected </{name}>")).into());
        };
        if open.raw_name != name {
            return Err(ParseError::new(
                ParseErrorKind::NotWellFormed,
                start,
                format!("</{name}> does not close <{}>", open.raw_name),
            )
            .into());
        }
        self.advance(end + 1);
        self.bindings.truncate(self.bindings.len() - open.bindings);
        if self.stack.is_empty() {
            self.state = State::Epilog;
        }
        Ok(Produced::End(EndTag {
            local: open.local,
            namespace: open.namespace,
            position: start,
        }))
    }

    fn read_text(&mut self) -> Result<(), XmlError> {
        self.text.clear();
        self.text_at = self.at;
        loop {
            if self.pos == self.len && !self.fill()? {
                return Ok(());
            }
            let avail = &self.buf[self.pos..self.len];
            let stop = memchr2(b'<', b'&', avail);
            let room = TEXT_CHUNK.saturating_sub(self.text.len()).max(4);
            let mut run = stop.unwrap_or(avail.len());
            let truncated = run > room;
            run = run.min(room);
            let more = truncated || (stop.is_none() && !self.eof);
            if more {
                run -= avail[..run].iter().rev().take(2).take_while(|&&b| b == b']').count();
            }
            if memmem::find(&avail[..run], b"]]>").is_some() {
                return Err(self.error(ParseErrorKind::NotWellFormed, "']]>' in character data").into());
            }
            let consumed = push_chars(&mut self.text, &avail[..run], more).map_err(|(k, d)| self.error(k, d))?;
            self.advance(consumed);
            if self.text.len() >= TEXT_CHUNK {
                return Ok(());
            }
            match stop {
                Some(i) if consumed == i => {
                    if self.buf[self.pos] == b'<' {
                        return Ok(());
                    }
                    let c = self.read_reference()?;
                    self.text.push(c);
                    if self.text.len() >= TEXT_CHUNK {
                        return Ok(());
                    }
                }
                _ => {
                    if !self.fill()? && self.pos == self.len {
                        return Ok(());
                    }
                }
            }
        }
    }

    fn read_reference(&mut self) -> Result<char, XmlError> {
        loop {
            let window = &self.avail()[..self.avail().len().min(MAX_REFERENCE)];
            if let Some(semi) = memchr(b';', window) {
                let body = &window[1..semi];
                let c = decode_reference(body).ok_or_else(|| {
                    self.error(
                        ParseErrorKind::NotWellFormed,
                        format!("undefined or illegal reference &{};", String::from_utf8_lossy(body)),
                    )
                })?;
                self.advance(semi + 1);
                return Ok(c);
            }
            if window.len() >= MAX_REFERENCE || !self.fill()? {
                return Err(self.error(ParseErrorKind::NotWellFormed, "unterminated reference").into());
            }
        }
    }

    fn read_cdata(&mut self) -> Result<(), XmlError> {
        self.text.clear();
        self.text_at = self.at;
        loop {
            let avail = &self.buf[self.pos..self.len];
            let room = TEXT_CHUNK.saturating_sub(self.text.len()).max(4);
            let end = memmem::find(&avail[..avail.len().min(room + 2)], b"]]>");
            if let Some(i) = end {
                let consumed = push_chars(&mut self.text, &avail[..i], false).map_err(|(k, d)| self.error(k, d))?;
                self.advance(consumed + 3);
                self.in_cdata = false;
                return Ok(());
            }
            let truncated = avail.len() > room;
            let more = truncated || !self.eof;
            let take = if more { avail.len().min(room).saturating_sub(2) } else { avail.len() };
            let consumed = push_chars(&mut self.text, &avail[..take], more).map_err(|(k, d)| self.error(k, d))?;
            self.advance(consumed);
            if self.text.len() >= TEXT_CHUNK {
                return Ok(());
            }
            if !self.fill()? && !truncated {
                return Err(self.error(ParseErrorKind::NotWellFormed, "unterminated CDATA section").into());
            }
        }
    }
}

/// Appends raw character data with line-end normalisation. When `more` is
/// set, an incomplete UTF-8 sequence or a trailing CR is left unconsumed.
fn push_chars(out: &mut String, raw: &[u8], more: bool) -> Result<usize, (ParseErrorKind, String)> {
    let mut n = raw.len();
    if more && raw.last() == Some(&b'\r') {
        n -= 1;
    }
    let s = match std::str::from_utf8(&raw[..n]) {
        Ok(s) => s,
        Err(e) if more && e.error_len().is_none() => {
            n = e.valid_up_to();
            std::str::from_utf8(&raw[..n]).expect("validated prefix")
        }
        Err(_) => return Err((ParseErrorKind::BadEncoding, "invalid UTF-8 sequence".into())),
    };
    if let Some(&b) = s.as_bytes().iter().find(|&&b| b < 0x20 && !matches!(b, b'\t' | b'\n' | b'\r')) {
        return Err((ParseErrorKind::NotWellFormed, format!("illegal character U+{b:04X}")));
    }
    if memchr(0xEF, s.as_bytes()).is_some() {
        if let Some(c) = s.chars().find(|&c| c == '\u{FFFE}' || c == '\u{FFFF}') {
            return Err((ParseErrorKind::NotWellFormed, format!("illegal character U+{:04X}", c as u32)));
        }
    }
    if memchr(b'\r', s.as_bytes()).is_some() {
        out.push_str(&s.replace("\r\n", "\n").replace('\r', "\n"));
    } else {
        out.push_str(s);
    }
    Ok(n)
}

fn decode_reference(body: &[u8]) -> Option<char> {
    let c = match body {
        b"lt" => '<',
        b"gt" => '>',
        b"amp" => '&',
        b"quot" => '"',
        b"apos" => '\'',
        [b'#', b'x', hex @ ..] if !hex.is_empty() => {
            let s = std::str::from_utf8(hex).ok()?;
            if !s.bytes().all(|b| b.is_ascii_hexdigit()) {
                return None;
            }
            char::from_u32(u32::from_str_radix(s, 16).ok()?)?
        }
        [b'#', dec @ ..] if !dec.is_empty() => {
            let s = std::str::from_utf8(dec).ok()?;
            if !s.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            char::from_u32(s.parse().ok()?)?
        }
        _ => return None,
    };
    is_xml_char(c).then_some(c)
}

fn split_qname(name: &str) -> Option<(Option<&str>, &str)> {
    match name.split_once(':') {
        None => Some((None, name)),
        Some((p, l)) if !p.is_empty() && !l.is_empty() && !l.contains(':') && l.starts_with(is_name_start) => {
            Some((Some(p), l))
        }
        _ => None,
    }
}

/// Parses `name="value"` pairs (whitespace-separated) with references
/// resolved and attribute-value normalisation applied.
fn parse_attributes(s: &str) -> Result<Vec<(String, String)>, String> {
    let mut out: Vec<(String, String)> = Vec::new();
    let mut rest = s;
    loop {
        let trimmed = rest.trim_start_matches([' ', '\t', '\r', '\n']);
        if trimmed.is_empty() {
            return Ok(out);
        }
        if trimmed.len() == rest.len() && !out.is_empty() {
            return Err("attributes must be separated by whitespace".into());
        }
        rest = trimmed;
        let name_len = rest.find(|c: char| !is_name_char(c)).unwrap_or(rest.len());
        let name = &rest[..name_len];
        if !name.starts_with(is_name_start) {
            return Err(format!("invalid attribute name near {:?}", truncate(rest)));
        }
        rest = rest[name_len..].trim_start_matches([' ', '\t', '\r', '\n']);
        rest = rest
            .strip_prefix('=')
            .ok_or_else(|| format!("attribute {name:?} has no value"))?
            .trim_start_matches([' ', '\t', '\r', '\n']);
        let quote = rest
            .chars()
            .next()
            .filter(|c| *c == '"' || *c == '\'')
            .ok_or_else(|| format!("attribute {name:?} value is not quoted"))?;
        let body_end = rest[1..].find(quote).ok_or_else(|| format!("attribute {name:?} value is unterminated"))?;
        let value = unescape_attribute(&rest[1..1 + body_end])?;
        if out.iter().any(|(n, _)| n == name) {
            return Err(format!("duplicate attribute {name:?}"));
        }
        out.push((name.to_owned(), value));
        rest = &rest[body_end + 2..];
    }
}

fn unescape_attribute(raw: &str) -> Result<String, String> {
    let mut out = String::with_capacity(raw.len());
    let mut chars = raw.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        match c {
            '<' => return Err("'<' in attribute value".into()),
            '&' => {
                let semi = raw[i..].find(';').ok_or("unterminated reference in attribute")?;
                let body = &raw[i + 1..i + semi];
                let c = decode_reference(body.as_bytes()).ok_or_else(|| format!("undefined or illegal reference &{body};"))?;
                out.push(c);
                while chars.peek().is_some_and(|&(j, _)| j <= i + semi) {
                    chars.next();
                }
            }
            '\r' => {
                if chars.peek().is_some_and(|&(_, n)| n == '\n') {
                    chars.next();
                }
                out.push(' ');
            }
            '\n' | '\t' => out.push(' '),
            c if !is_xml_char(c) => return Err(format!("illegal character U+{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    Ok(out)
}

fn truncate(s: &str) -> &str {
    match s.char_indices().nth(16) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}
