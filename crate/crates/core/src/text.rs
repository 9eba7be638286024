//! Character-level helpers shared by the codec and the model.

use std::io::{self, Write};

/// XML 1.0 `Char` production.
pub fn is_xml_char(c: char) -> bool {
    matches!(c,
        '\u{9}' | '\u{A}' | '\u{D}'
        | '\u{20}'..='\u{D7FF}'
        | '\u{E000}'..='\u{FFFD}'
        | '\u{10000}'..='\u{10FFFF}')
}

pub fn first_illegal_char(s: &str) -> Option<char> {
    s.chars().find(|&c| !is_xml_char(c))
}

pub(crate) fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == ':' || (!c.is_ascii() && is_xml_char(c))
}

pub(crate) fn is_name_char(c: char) -> bool {
    is_name_start(c) || c.is_ascii_digit() || c == '-' || c == '.'
}

/// Escapes character data. `>` is always escaped so `]]>` can never appear.
/// Carriage returns become references because parsers normalise raw CR to LF.
pub fn write_escaped_text<W: Write + ?Sized>(out: &mut W, s: &str) -> io::Result<()> {
    write_escaped(out, s, |b| match b {
        b'&' => Some("&amp;"),
        b'<' => Some("&lt;"),
        b'>' => Some("&gt;"),
        b'\r' => Some("&#xD;"),
        _ => None,
    })
}

/// Escapes an attribute value for use inside double quotes. Whitespace other
/// than space is written as references so attribute-value normalisation
/// leaves it intact.
pub fn write_escaped_attr<W: Write + ?Sized>(out: &mut W, s: &str) -> io::Result<()> {
    write_escaped(out, s, |b| match b {
        b'&' => Some("&amp;"),
        b'<' => Some("&lt;"),
        b'"' => Some("&quot;"),
        b'\t' => Some("&#x9;"),
        b'\n' => Some("&#xA;"),
        b'\r' => Some("&#xD;"),
        _ => None,
    })
}

fn write_escaped<W: Write + ?Sized>(
    out: &mut W,
    s: &str,
    replace: impl Fn(u8) -> Option<&'static str>,
) -> io::Result<()> {
    let bytes = s.as_bytes();
    let mut last = 0;
    for (i, &b) in bytes.iter().enumerate() {
        if let Some(rep) = replace(b) {
            out.write_all(&bytes[last..i])?;
            out.write_all(rep.as_bytes())?;
            last = i + 1;
        }
    }
    out.write_all(&bytes[last..])
}
