//! Streaming rule engine. One frame per open element carries just enough
//! state (sequence cursor, occurrence counts, leaf text checks) to report
//! every violation in a single pass.

use std::io::Read;

use super::rules::*;
use super::{Finding, Severity};
use crate::media::{DataUriScanner, MAX_EDITOR_DIMENSION};
use crate::model::{Date, SLN_NAMESPACE};
use crate::xml::{is_xml_whitespace, Event, Position, StartTag, XmlError, XmlReader, XSI_NAMESPACE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Root,
    Website,
    Group(&'static [Particle]),
    RelUri,
    Contact,
    Dataset,
    Image,
    Full,
    Thumbnail,
    Video,
    Todo,
    Text(TextKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TextKind {
    Plain,
    Purpose,
    Date,
    Data,
    TodoText,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Particle {
    name: &'static str,
    kind: Kind,
    required: bool,
    repeats: bool,
}

const fn one(name: &'static str, kind: Kind) -> Particle {
    Particle { name, kind, required: true, repeats: false }
}

const fn optional(name: &'static str, kind: Kind) -> Particle {
    Particle { name, kind, required: false, repeats: false }
}

const fn many(name: &'static str, kind: Kind) -> Particle {
    Particle { name, kind, required: true, repeats: true }
}

const PLAIN: Kind = Kind::Text(TextKind::Plain);

const ROOT_MODEL: &[Particle] = &[Particle { name: "website", kind: Kind::Website, required: false, repeats: true }];
const WEBSITE_MODEL: &[Particle] = &[
    one("purpose", Kind::Text(TextKind::Purpose)),
    one("date", Kind::Text(TextKind::Date)),
    optional("related", Kind::Group(&[many("reluri", Kind::RelUri)])),
    optional("contacts", Kind::Group(&[many("contact", Kind::Contact)])),
    optional("datasets", Kind::Group(&[many("dataset", Kind::Dataset)])),
    optional("images", Kind::Group(&[many("image", Kind::Image)])),
    optional("videos", Kind::Group(&[many("video", Kind::Video)])),
    optional("todos", Kind::Group(&[many("todo", Kind::Todo)])),
    optional("othernotes", Kind::Group(&[many("note", PLAIN)])),
];
const RELURI_MODEL: &[Particle] = &[one("notes", PLAIN)];
const CONTACT_MODEL: &[Particle] = &[one("email", PLAIN), one("webpage", PLAIN), one("notes", PLAIN)];
const DATASET_MODEL: &[Particle] = &[one("notes", PLAIN), one("content", PLAIN)];
const IMAGE_MODEL: &[Particle] = &[one("notes", PLAIN), one("full", Kind::Full), one("thumbnail", Kind::Thumbnail)];
const SIZED_MODEL: &[Particle] = &[one("data", Kind::Text(TextKind::Data))];
const VIDEO_MODEL: &[Particle] = &[one("notes", PLAIN), optional("data", Kind::Text(TextKind::Data))];
const TODO_MODEL: &[Particle] = &[one("text", Kind::Text(TextKind::TodoText))];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AttrType {
    AnyString,
    NonEmpty,
    Dimension,
    Boolean,
    Date,
}

struct AttrSpec {
    name: &'static str,
    required: bool,
    ty: AttrType,
}

const fn attr(name: &'static str, required: bool, ty: AttrType) -> AttrSpec {
    AttrSpec { name, required, ty }
}

impl Kind {
    fn model(self) -> &'static [Particle] {
        match self {
            Kind::Root => ROOT_MODEL,
            Kind::Website => WEBSITE_MODEL,
            Kind::Group(m) => m,
            Kind::RelUri => RELURI_MODEL,
            Kind::Contact => CONTACT_MODEL,
            Kind::Dataset => DATASET_MODEL,
            Kind::Image => IMAGE_MODEL,
            Kind::Full | Kind::Thumbnail => SIZED_MODEL,
            Kind::Video => VIDEO_MODEL,
            Kind::Todo => TODO_MODEL,
            Kind::Text(_) => &[],
        }
    }

    fn sequence_rule(self) -> &'static str {
        match self {
            Kind::Website => SEQ_WEBSITE,
            Kind::Contact => SEQ_CONTACT,
            Kind::Dataset => SEQ_DATASET,
            Kind::Image => SEQ_IMAGE,
            Kind::Video => SEQ_VIDEO,
            // Single-particle models cannot be out of order.
            _ => unreachable!("no sequence rule for {self:?}"),
        }
    }

    fn attributes(self) -> &'static [AttrSpec] {
        match self {
            Kind::Website => WEBSITE_ATTRS,
            Kind::RelUri => RELURI_ATTRS,
            Kind::Contact => CONTACT_ATTRS,
            Kind::Dataset | Kind::Video => NAME_ATTRS,
            Kind::Image => IMAGE_ATTRS,
            Kind::Full | Kind::Thumbnail => SIZE_ATTRS,
            Kind::Todo => TODO_ATTRS,
            _ => &[],
        }
    }
}

const WEBSITE_ATTRS: &[AttrSpec] = &[attr("name", true, AttrType::NonEmpty), attr("location", true, AttrType::AnyString)];
const RELURI_ATTRS: &[AttrSpec] = &[attr("value", true, AttrType::NonEmpty)];
const CONTACT_ATTRS: &[AttrSpec] = &[attr("name", true, AttrType::NonEmpty), attr("surname", true, AttrType::NonEmpty)];
const NAME_ATTRS: &[AttrSpec] = &[attr("name", true, AttrType::NonEmpty)];
const IMAGE_ATTRS: &[AttrSpec] = &[attr("name", true, AttrType::NonEmpty), attr("url", false, AttrType::AnyString)];
const SIZE_ATTRS: &[AttrSpec] = &[attr("width", true, AttrType::Dimension), attr("height", true, AttrType::Dimension)];
const TODO_ATTRS: &[AttrSpec] = &[attr("done", false, AttrType::Boolean), attr("due", false, AttrType::Date)];

const MAX_DATE_TEXT: usize = 64;

enum TextState {
    None,
    Short { buf: String, overflow: bool },
    Data(DataUriScanner),
    Seen(bool),
}

struct Frame {
    kind: Kind,
    name: String,
    path: String,
    start: Position,
    cursor: usize,
    counts: [u32; 9],
    order_reported: bool,
    stray_reported: bool,
    siblings: Vec<(String, u32)>,
    text: TextState,
    dims: Option<(u32, u32)>,
    image_dims: [Option<(u32, u32)>; 2],
}

impl Frame {
    fn new(kind: Kind, name: String, path: String, start: Position) -> Self {
        let text = match kind {
            Kind::Text(TextKind::Date) => TextState::Short { buf: String::new(), overflow: false },
            Kind::Text(TextKind::Data) => TextState::Data(DataUriScanner::new()),
            Kind::Text(TextKind::TodoText) | Kind::Text(TextKind::Purpose) => TextState::Seen(false),
            _ => TextState::None,
        };
        Frame {
            kind,
            name,
            path,
            start,
            cursor: 0,
            counts: [0; 9],
            order_reported: false,
            stray_reported: false,
            siblings: Vec::new(),
            text,
            dims: None,
            image_dims: [None, None],
        }
    }

    /// Path of the next child called `name`; `[n]` is added from the
    /// second same-named sibling on.
    fn child_path(&mut self, name: &str) -> String {
        let n = match self.siblings.iter_mut().find(|(s, _)| s == name) {
            Some((_, n)) => {
                *n += 1;
                *n
            }
            None => {
                self.siblings.push((name.to_owned(), 1));
                1
            }
        };
        if n == 1 {
            format!("{}/{name}", self.path)
        } else {
            format!("{}/{name}[{n}]", self.path)
        }
    }
}

struct Engine {
    lenient: bool,
    findings: Vec<Finding>,
    stack: Vec<Frame>,
    skip: usize,
}

impl Engine {
    fn report(&mut self, rule: &'static str, path: &str, at: Position, message: String) {
        let severity = match rule {
            UNKNOWN_ELEMENT | UNKNOWN_ATTR | STRAY_TEXT if self.lenient => Severity::Warning,
            _ => Severity::Error,
        };
        self.findings.push(Finding {
            rule_id: rule.to_owned(),
            path: path.to_owned(),
            severity,
            message,
            line: at.line,
            column: at.column,
        });
    }

    fn start(&mut self, tag: StartTag) {
        if self.skip > 0 {
            self.skip += 1;
            return;
        }
        let Some(parent) = self.stack.last_mut() else {
            self.root(tag);
            return;
        };
        let path = parent.child_path(&tag.local);
        let parent_kind = parent.kind;
        let Some(index) = parent_kind.model().iter().position(|p| p.name == tag.local) else {
            let detail = match (&parent_kind, tag.namespace.as_deref()) {
                (Kind::Text(_), _) => format!("element <{}> inside text-only <{}>", tag.local, parent.name),
                (_, Some(SLN_NAMESPACE)) => format!("element <{}> is not allowed in <{}>", tag.local, parent.name),
                (_, Some(ns)) => format!("element <{}> in namespace {ns} is not allowed in <{}>", tag.local, parent.name),
                (_, None) => format!("unqualified element <{}> is not allowed in <{}>", tag.local, parent.name),
            };
            self.report(UNKNOWN_ELEMENT, &path, tag.position, detail);
            self.skip = 1;
            return;
        };
        self.count_child(index, &tag, &path);
        if tag.namespace.as_deref() != Some(SLN_NAMESPACE) {
            let detail = match tag.namespace.as_deref() {
                Some(ns) => format!("<{}> is in namespace {ns}, expected {SLN_NAMESPACE}", tag.local),
                None => format!("<{}> is not namespace-qualified", tag.local),
            };
            self.report(QUALIFIED, &path, tag.position, detail);
            self.skip = 1;
            return;
        }
        let kind = parent_kind.model()[index].kind;
        let frame = Frame::new(kind, tag.local.clone(), path, tag.position);
        self.check_attributes(&tag, &frame);
        self.stack.push(frame);
    }

    fn root(&mut self, tag: StartTag) {
        if !tag.is(SLN_NAMESPACE, "sln") {
            let ns = tag.namespace.as_deref().unwrap_or("no namespace");
            let path = format!("/{}", tag.local);
            self.report(ROOT, &path, tag.position, format!("document element is <{}> in {ns}", tag.local));
            self.skip = 1;
            return;
        }
        let frame = Frame::new(Kind::Root, "sln".into(), "/sln".into(), tag.position);
        self.check_attributes(&tag, &frame);
        self.stack.push(frame);
    }

    fn count_child(&mut self, index: usize, tag: &StartTag, path: &str) {
        let parent = self.stack.last_mut().expect("child has a parent");
        let particle = parent.kind.model()[index];
        let seen = parent.counts[index];
        parent.counts[index] += 1;
        if seen >= 1 && !particle.repeats {
            let parent_name = parent.name.clone();
            self.report(
                TOO_MANY,
                path,
                tag.position,
                format!("<{}> may occur at most once in <{parent_name}>", tag.local),
            );
        } else if index < parent.cursor {
            if !parent.order_reported {
                parent.order_reported = true;
                let rule = parent.kind.sequence_rule();
                let after = parent.kind.model()[parent.cursor].name;
                let parent_path = parent.path.clone();
                self.report(
                    rule,
                    &parent_path,
                    tag.position,
                    format!("<{}> appears after <{after}>", tag.local),
                );
            }
        } else {
            parent.cursor = index;
        }
    }

    fn check_attributes(&mut self, tag: &StartTag, frame: &Frame) {
        let specs = frame.kind.attributes();
        for a in &tag.attributes {
            if let Some(ns) = a.namespace.as_deref() {
                if !(frame.kind == Kind::Root && ns == XSI_NAMESPACE && a.local == "schemaLocation") {
                    self.report(
                        UNKNOWN_ATTR,
                        &frame.path,
                        tag.position,
                        format!("attribute {{{ns}}}{} is not allowed on <{}>", a.local, frame.name),
                    );
                }
                continue;
            }
            let Some(spec) = specs.iter().find(|s| s.name == a.local) else {
                self.report(
                    UNKNOWN_ATTR,
                    &frame.path,
                    tag.position,
                    format!("attribute {:?} is not allowed on <{}>", a.local, frame.name),
                );
                continue;
            };
            let problem = match spec.ty {
                AttrType::AnyString => None,
                AttrType::NonEmpty => a.value.is_empty().then_some(NON_EMPTY),
                AttrType::Dimension => parse_dimension(&a.value).is_none().then_some(DIMENSION),
                AttrType::Boolean => (!matches!(a.value.as_str(), "true" | "false" | "1" | "0")).then_some(BOOLEAN),
                AttrType::Date => a.value.parse::<Date>().is_err().then_some(DATE),
            };
            if let Some(rule) = problem {
                self.report(
                    rule,
                    &frame.path,
                    tag.position,
                    format!("attribute {:?} has invalid value {:?}", a.local, a.value),
                );
            }
        }
        for spec in specs.iter().filter(|s| s.required) {
            if tag.attr(spec.name).is_none() {
                self.report(
                    REQUIRED_ATTR,
                    &frame.path,
                    tag.position,
                    format!("<{}> lacks required attribute {:?}", frame.name, spec.name),
                );
            }
        }
    }

    /// Returns true when the text is stray character data that still needs
    /// reporting; the caller supplies its position.
    fn text(&mut self, text: &str) -> bool {
        if self.skip > 0 {
            return false;
        }
        let Some(frame) = self.stack.last_mut() else {
            return false;
        };
        match (&mut frame.text, frame.kind) {
            (TextState::Short { buf, overflow }, _) => {
                if buf.len() + text.len() > MAX_DATE_TEXT {
                    *overflow = true;
                } else {
                    buf.push_str(text);
                }
            }
            (TextState::Data(scanner), _) => scanner.feed(text),
            (TextState::Seen(seen), Kind::Text(TextKind::Purpose)) => *seen |= !text.trim().is_empty(),
            (TextState::Seen(seen), _) => *seen |= !text.is_empty(),
            (TextState::None, Kind::Text(_)) => {}
            (TextState::None, _) => {
                if !is_xml_whitespace(text) && !frame.stray_reported {
                    frame.stray_reported = true;
                    return true;
                }
            }
        }
        false
    }

    fn stray_text(&mut self, at: Position) {
        let frame = self.stack.last().expect("text inside an element");
        let (path, name) = (frame.path.clone(), frame.name.clone());
        self.report(STRAY_TEXT, &path, at, format!("character data inside element-only <{name}>"));
    }

    fn end(&mut self) {
        if self.skip > 0 {
            self.skip -= 1;
            return;
        }
        let Some(mut frame) = self.stack.pop() else {
            return;
        };
        for (i, p) in frame.kind.model().iter().enumerate() {
            if p.required && frame.counts[i] == 0 {
                self.report(
                    MISSING_CHILD,
                    &frame.path,
                    frame.start,
                    format!("<{}> lacks required <{}>", frame.name, p.name),
                );
            }
        }
        match std::mem::replace(&mut frame.text, TextState::None) {
            TextState::Short { buf, overflow } => {
                if overflow || buf.parse::<Date>().is_err() {
                    let shown: String = buf.chars().take(MAX_DATE_TEXT).collect();
                    self.report(DATE, &frame.path, frame.start, format!("{shown:?} is not a YYYY-MM-DD date"));
                }
            }
            TextState::Data(scanner) => {
                if let Err(detail) = scanner.finish() {
                    self.report(DATA_URI, &frame.path, frame.start, format!("invalid data URI: {detail}"));
                }
            }
            TextState::Seen(false) if frame.kind == Kind::Text(TextKind::Purpose) => {}
            TextState::Seen(false) => {
                self.report(NON_EMPTY, &frame.path, frame.start, format!("<{}> is empty", frame.name));
            }
            _ => {}
        }
        match frame.kind {
            Kind::Full | Kind::Thumbnail => {
                let slot = usize::from(frame.kind == Kind::Thumbnail);
                if let Some(parent) = self.stack.last_mut() {
                    parent.image_dims[slot] = frame.dims;
                }
            }
            Kind::Image => {
                if let [Some((fw, fh)), Some((tw, th))] = frame.image_dims {
                    if tw > fw || th > fh {
                        self.report(
                            THUMB_FITS,
                            &frame.path,
                            frame.start,
                            format!("thumbnail {tw}x{th} exceeds full image {fw}x{fh}"),
                        );
                    }
                }
            }
            _ => {}
        }
    }
}

fn parse_dimension(value: &str) -> Option<u32> {
    value
        .parse::<u32>()
        .ok()
        .filter(|v| (1..=MAX_EDITOR_DIMENSION).contains(v))
}

pub(crate) fn run<R: Read>(source: R, lenient: bool) -> Result<Vec<Finding>, XmlError> {
    let mut reader = XmlReader::new(source);
    let mut engine = Engine {
        lenient,
        findings: Vec::new(),
        stack: Vec::new(),
        skip: 0,
    };
    while let Some(event) = reader.next_event()? {
        match event {
            Event::Start(tag) => {
                let dims = match (tag.attr("width"), tag.attr("height")) {
                    (Some(w), Some(h)) => parse_dimension(w).zip(parse_dimension(h)),
                    _ => None,
                };
                let depth = engine.stack.len();
                engine.start(tag);
                if engine.stack.len() > depth {
                    if let Some(frame) = engine.stack.last_mut() {
                        frame.dims = dims;
                    }
                }
            }
            Event::Text(text) => {
                if engine.text(text) {
                    engine.stray_text(reader.text_position());
                }
            }
            Event::End(_) => engine.end(),
        }
    }
    engine
        .findings
        .sort_by_key(|f| (f.line, f.column));
    Ok(engine.findings)
}
