//! Canonical writer: UTF-8 declaration, schema element order, fixed
//! attribute order, two-space indentation, LF line ends. Empty groups are
//! omitted and empty leaf elements are written self-closed.

use std::io::{self, BufWriter, Write};

use crate::media::datauri::write_data_uri;
use crate::model::{
    Contact, Dataset, ImageRecord, MediaBlob, Notebook, Note, RelatedUrl, TodoItem, VideoRecord, WebsiteEntry,
    SLN_NAMESPACE,
};
use crate::text::{write_escaped_attr, write_escaped_text};

use super::XSI_NAMESPACE;

/// Writes `nb` in canonical form. The notebook is expected to satisfy the
/// model invariants ([`Notebook::validate`]).
pub fn serialize_notebook<W: Write>(nb: &Notebook, sink: W) -> io::Result<()> {
    let mut out = BufWriter::with_capacity(64 * 1024, sink);
    write_header(&mut out, nb.schema_location.as_deref(), nb.websites.is_empty())?;
    for site in &nb.websites {
        write_website(&mut out, site)?;
    }
    write_footer(&mut out, nb.websites.is_empty())?;
    out.flush()
}

pub fn serialize_to_vec(nb: &Notebook) -> Vec<u8> {
    let mut out = Vec::new();
    serialize_notebook(nb, &mut out).expect("writing to a Vec cannot fail");
    out
}

pub(crate) fn write_header<W: Write + ?Sized>(out: &mut W, schema_location: Option<&str>, empty: bool) -> io::Result<()> {
    out.write_all(b"<?xml version=\"1.0\" encoding=\"utf-8\"?>\n")?;
    write!(out, "<sln xmlns=\"{SLN_NAMESPACE}\"")?;
    if let Some(loc) = schema_location {
        write!(out, " xmlns:xsi=\"{XSI_NAMESPACE}\" xsi:schemaLocation=\"")?;
        write_escaped_attr(out, loc)?;
        out.write_all(b"\"")?;
    }
    out.write_all(if empty { b"/>\n" } else { b">\n" })
}

pub(crate) fn write_footer<W: Write + ?Sized>(out: &mut W, empty: bool) -> io::Result<()> {
    if empty {
        Ok(())
    } else {
        out.write_all(b"</sln>\n")
    }
}

struct Writer<'a, W: ?Sized> {
    out: &'a mut W,
    depth: usize,
}

impl<W: Write + ?Sized> Writer<'_, W> {
    fn indent(&mut self) -> io::Result<()> {
        for _ in 0..self.depth {
            self.out.write_all(b"  ")?;
        }
        Ok(())
    }

    fn open(&mut self, name: &str, attrs: &[(&str, &str)]) -> io::Result<()> {
        self.indent()?;
        self.start_tag(name, attrs)?;
        self.out.write_all(b">\n")?;
        self.depth += 1;
        Ok(())
    }

    fn close(&mut self, name: &str) -> io::Result<()> {
        self.depth -= 1;
        self.indent()?;
        writeln!(self.out, "</{name}>")
    }

    fn start_tag(&mut self, name: &str, attrs: &[(&str, &str)]) -> io::Result<()> {
        write!(self.out, "<{name}")?;
        for (k, v) in attrs {
            write!(self.out, " {k}=\"")?;
            write_escaped_attr(self.out, v)?;
            self.out.write_all(b"\"")?;
        }
        Ok(())
    }

    fn leaf(&mut self, name: &str, attrs: &[(&str, &str)], text: &str) -> io::Result<()> {
        self.indent()?;
        self.start_tag(name, attrs)?;
        if text.is_empty() {
            return self.out.write_all(b"/>\n");
        }
        self.out.write_all(b">")?;
        write_escaped_text(self.out, text)?;
        writeln!(self.out, "</{name}>")
    }

    fn data(&mut self, blob: &MediaBlob) -> io::Result<()> {
        self.indent()?;
        self.out.write_all(b"<data>")?;
        write_data_uri(self.out, &blob.media_type, &blob.payload)?;
        self.out.write_all(b"</data>\n")
    }

    fn group<T>(&mut self, name: &str, items: &[T], mut each: impl FnMut(&mut Self, &T) -> io::Result<()>) -> io::Result<()> {
        if items.is_empty() {
            return Ok(());
        }
        self.open(name, &[])?;
        for item in items {
            each(self, item)?;
        }
        self.close(name)
    }
}

pub(crate) fn write_website<W: Write + ?Sized>(out: &mut W, site: &WebsiteEntry) -> io::Result<()> {
    let mut w = Writer { out, depth: 1 };
    w.open("website", &[("name", &site.name), ("location", &site.location)])?;
    w.leaf("purpose", &[], &site.purpose)?;
    w.leaf("date", &[], &site.date.to_string())?;
    w.group("related", &site.related, |w, r: &RelatedUrl| {
        w.open("reluri", &[("value", &r.value)])?;
        w.leaf("notes", &[], &r.notes)?;
        w.close("reluri")
    })?;
    w.group("contacts", &site.contacts, |w, c: &Contact| {
        w.open("contact", &[("name", &c.name), ("surname", &c.surname)])?;
        w.leaf("email", &[], &c.email)?;
        w.leaf("webpage", &[], &c.webpage)?;
        w.leaf("notes", &[], &c.notes)?;
        w.close("contact")
    })?;
    w.group("datasets", &site.datasets, |w, d: &Dataset| {
        w.open("dataset", &[("name", &d.name)])?;
        w.leaf("notes", &[], &d.notes)?;
        w.leaf("content", &[], &d.content)?;
        w.close("dataset")
    })?;
    w.group("images", &site.images, |w, img: &ImageRecord| {
        let mut attrs = vec![("name", img.name.as_str())];
        if let Some(url) = &img.related_url {
            attrs.push(("url", url));
        }
        w.open("image", &attrs)?;
        w.leaf("notes", &[], &img.notes)?;
        for (name, blob, width, height) in [
            ("full", &img.full, img.full_width, img.full_height),
            ("thumbnail", &img.thumbnail, img.thumb_width, img.thumb_height),
        ] {
            let (width, height) = (width.to_string(), height.to_string());
            w.open(name, &[("width", &width), ("height", &height)])?;
            w.data(blob)?;
            w.close(name)?;
        }
        w.close("image")
    })?;
    w.group("videos", &site.videos, |w, v: &VideoRecord| {
        w.open("video", &[("name", &v.name)])?;
        w.leaf("notes", &[], &v.notes)?;
        if let Some(media) = &v.media {
            w.data(media)?;
        }
        w.close("video")
    })?;
    w.group("todos", &site.todos, |w, t: &TodoItem| {
        let due = t.due_date.map(|d| d.to_string());
        let mut attrs = vec![("done", if t.done { "true" } else { "false" })];
        if let Some(due) = &due {
            attrs.push(("due", due));
        }
        w.open("todo", &attrs)?;
        w.leaf("text", &[], &t.text)?;
        w.close("todo")
    })?;
    w.group("othernotes", &site.other_notes, |w, n: &Note| w.leaf("note", &[], &n.text))?;
    w.close("website")
}
