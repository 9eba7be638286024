//! Generators and helpers shared by the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;
use sln_core::media::MediaType;
use sln_core::model::{
    Contact, Dataset, Date, ImageRecord, MediaBlob, Note, Notebook, RelatedUrl, TodoItem, VideoRecord, WebsiteEntry,
};

pub const SAMPLE: &str = include_str!("../fixtures/soho_sample.sln");
pub const RED_1X1_PNG: &[u8] = include_bytes!("../fixtures/red1x1.png");

/// Characters that stress escaping, whitespace handling and UTF-8 width.
const AWKWARD: &[char] = &[
    '<', '>', '&', '"', '\'', ']', '\t', '\n', '\r', ' ', 'é', 'Σ', 'ς', 'ß', '中', '\u{FFFD}', '\u{10000}',
    '\u{1F31E}', '\u{1D11E}', '\u{10FFFF}',
];

fn xml_char() -> impl Strategy<Value = char> {
    prop_oneof![
        4 => prop::char::range('a', 'z'),
        2 => prop::char::range(' ', '~'),
        3 => prop::sample::select(AWKWARD),
        1 => any::<char>().prop_filter("XML Char", |&c| sln_core::text::is_xml_char(c)),
    ]
}

pub fn text(max: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(xml_char(), 0..=max).prop_map(String::from_iter)
}

pub fn name() -> impl Strategy<Value = String> {
    prop::collection::vec(xml_char(), 1..=10).prop_map(String::from_iter)
}

pub fn date() -> impl Strategy<Value = Date> {
    (0u64..3_000_000).prop_map(|d| Date::from_ymd(1, 1, 1).and_then(|base| base.add_days(d)).expect("in range"))
}

pub fn media_type() -> impl Strategy<Value = MediaType> {
    prop::sample::select(&["image/png", "image/jpeg", "application/octet-stream", "text/plain;charset=utf-8", "video/mp4"][..])
        .prop_map(|s| s.parse().expect("valid media type"))
}

pub fn blob() -> impl Strategy<Value = MediaBlob> {
    (media_type(), prop::collection::vec(any::<u8>(), 0..48)).prop_map(|(t, p)| MediaBlob::new(t, p))
}

fn related() -> impl Strategy<Value = RelatedUrl> {
    (name(), text(8)).prop_map(|(value, notes)| RelatedUrl { value, notes })
}

fn contact() -> impl Strategy<Value = Contact> {
    (name(), name(), text(6), text(6), text(6)).prop_map(|(name, surname, email, webpage, notes)| Contact {
        name,
        surname,
        email,
        webpage,
        notes,
    })
}

fn dataset() -> impl Strategy<Value = Dataset> {
    (name(), text(6), text(40)).prop_map(|(name, notes, content)| Dataset { name, notes, content })
}

fn image() -> impl Strategy<Value = ImageRecord> {
    (1u32..=2048, 1u32..=2048)
        .prop_flat_map(|(w, h)| (Just(w), Just(h), 1..=w, 1..=h))
        .prop_flat_map(|(fw, fh, tw, th)| {
            (name(), text(6), prop::option::of(name()), blob(), blob()).prop_map(
                move |(name, notes, related_url, full, thumbnail)| ImageRecord {
                    name,
                    notes,
                    related_url,
                    full,
                    thumbnail,
                    full_width: fw,
                    full_height: fh,
                    thumb_width: tw,
                    thumb_height: th,
                },
            )
        })
}

fn video() -> impl Strategy<Value = VideoRecord> {
    (name(), text(6), prop::option::of(blob())).prop_map(|(name, notes, media)| VideoRecord { name, notes, media })
}

fn todo() -> impl Strategy<Value = TodoItem> {
    (name(), prop::option::of(date()), any::<bool>()).prop_map(|(text, due_date, done)| TodoItem { text, due_date, done })
}

fn note() -> impl Strategy<Value = Note> {
    text(12).prop_map(|text| Note { text })
}

fn group<T: std::fmt::Debug>(s: impl Strategy<Value = T>) -> impl Strategy<Value = Vec<T>> {
    prop::collection::vec(s, 0..3)
}

pub fn website() -> impl Strategy<Value = WebsiteEntry> {
    (
        (name(), text(12), text(12), date()),
        (group(related()), group(contact()), group(dataset()), group(image())),
        (group(video()), group(todo()), group(note())),
    )
        .prop_map(|((name, location, purpose, date), (r, c, d, i), (v, t, n))| WebsiteEntry {
            related: r,
            contacts: c,
            datasets: d,
            images: i,
            videos: v,
            todos: t,
            other_notes: n,
            ..WebsiteEntry::new(name, location, purpose, date)
        })
}

pub fn notebook() -> impl Strategy<Value = Notebook> {
    (prop::collection::vec(website(), 0..4), prop::option::of(name()))
        .prop_map(|(websites, schema_location)| Notebook { websites, schema_location })
}

/// The sample document as a model value, transcribed by hand.
pub fn sample_notebook() -> Notebook {
    let rel = |value: &str, notes: &str| RelatedUrl { value: value.into(), notes: notes.into() };
    let mut site = WebsiteEntry::new(
        "Latest SOHO Images",
        "http://soho.nascom.nasa.gov/data/realtime-images.html",
        "SOHO remote sensing data",
        Date::from_ymd(2014, 9, 5).expect("real date"),
    );
    site.related = vec![
        rel("http://sdo.gsfc.nasa.gov/data/", "SDO near-realtime image data"),
        rel("http://soho.nascom.nasa.gov/data/realtime/mpeg/", "Near-realtime SOHO MPEG movies"),
        rel("http://www.swpc.noaa.gov/wsa-enlil/", "NOAA SWPC WSA-ENLIL Model Prediction"),
        rel(
            "http://www.swpc.noaa.gov/today2.html",
            "Integrated Solar Soft X-Ray flux and satellite environment plots",
        ),
    ];
    site.contacts = vec![Contact {
        name: "New".into(),
        surname: "Contact".into(),
        email: "email@nasa.gov".into(),
        webpage: "nasa.gov".into(),
        notes: "New Contact".into(),
    }];
    Notebook {
        websites: vec![site],
        schema_location: Some(sln_core::model::DEFAULT_SCHEMA_LOCATION.into()),
    }
}

/// Reader handing out at most `step` bytes per call.
pub struct Trickle<'a> {
    pub data: &'a [u8],
    pub step: usize,
}

impl std::io::Read for Trickle<'_> {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        let n = self.step.min(buf.len()).min(self.data.len());
        buf[..n].copy_from_slice(&self.data[..n]);
        self.data = &self.data[n..];
        Ok(n)
    }
}

/// Independent entity escaping for character data.
pub fn escape_oracle(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars() {
        match c {
            '<' => out.push_str("&lt;"),
            '&' => out.push_str("&amp;"),
            '>' => out.push_str("&gt;"),
            '\r' => out.push_str("&#xD;"),
            c => out.push(c),
        }
    }
    out
}

/// Independent base64 (RFC 4648, padded).
pub fn base64_oracle(bytes: &[u8]) -> String {
    const ALPHABET: &[u8; 64] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    let mut out = String::new();
    for chunk in bytes.chunks(3) {
        let b = [chunk[0], *chunk.get(1).unwrap_or(&0), *chunk.get(2).unwrap_or(&0)];
        let n = (u32::from(b[0]) << 16) | (u32::from(b[1]) << 8) | u32::from(b[2]);
        for i in 0..4 {
            if i <= chunk.len() {
                out.push(ALPHABET[((n >> (18 - 6 * i)) & 63) as usize] as char);
            } else {
                out.push('=');
            }
        }
    }
    out
}

const RED_URI: &str = "data:image/png;base64,iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAYAAAAfFcSJAAAADUlEQVR4nGP4z8DwHwAFAAH/iZk9HQAAAABJRU5ErkJggg==";

/// A valid document exercising every element and attribute of the format.
pub fn rich_document() -> String {
    format!(
        r#"<?xml version="1.0" encoding="utf-8"?>
<sln xmlns="http://umbra.nascom.nasa.gov/">
  <website name="Latest SOHO Images" location="http://soho.nascom.nasa.gov/">
    <purpose>SOHO remote sensing data</purpose>
    <date>2014-09-05</date>
    <related>
      <reluri value="http://sdo.gsfc.nasa.gov/data/">
        <notes>SDO near-realtime image data</notes>
      </reluri>
    </related>
    <contacts>
      <contact name="New" surname="Contact">
        <email>email@nasa.gov</email>
        <webpage>nasa.gov</webpage>
        <notes>New Contact</notes>
      </contact>
    </contacts>
    <datasets>
      <dataset name="flux.csv">
        <notes>GOES</notes>
        <content>time,flux</content>
      </dataset>
    </datasets>
    <images>
      <image name="red" url="http://example.org/red">
        <notes>one pixel</notes>
        <full width="1" height="1">
          <data>{RED_URI}</data>
        </full>
        <thumbnail width="1" height="1">
          <data>{RED_URI}</data>
        </thumbnail>
      </image>
    </images>
    <videos>
      <video name="cme">
        <notes>placeholder</notes>
        <data>data:video/mp4;base64,AAAA</data>
      </video>
    </videos>
    <todos>
      <todo done="false" due="2014-09-06">
        <text>check NOAA plots</text>
      </todo>
    </todos>
    <othernotes>
      <note>quiet sun</note>
    </othernotes>
  </website>
</sln>
"#
    )
}

fn swap(doc: &str, a: &str, b: &str) -> String {
    assert!(doc.contains(a) && doc.contains(b), "swap anchors missing");
    doc.replacen(a, "\u{0}", 1).replacen(b, a, 1).replacen('\u{0}', b, 1)
}

fn edit(doc: &str, from: &str, to: &str) -> String {
    assert!(doc.contains(from), "anchor {from:?} missing");
    doc.replacen(from, to, 1)
}

/// One minimal mutant of [`rich_document`] per catalogue rule, paired with
/// the only rule it should trigger.
pub fn mutants() -> Vec<(&'static str, String)> {
    let d = rich_document();
    let thumb = "<thumbnail width=\"1\" height=\"1\">";
    vec![
        ("SLN-ROOT-001", edit(&edit(&d, "<sln ", "<notebook "), "</sln>", "</notebook>")),
        ("SLN-NS-001", edit(&d, "<purpose>", "<purpose xmlns=\"\">")),
        (
            "SLN-SEQ-001",
            swap(&d, "<purpose>SOHO remote sensing data</purpose>", "<date>2014-09-05</date>"),
        ),
        (
            "SLN-SEQ-002",
            swap(&d, "<email>email@nasa.gov</email>", "<webpage>nasa.gov</webpage>"),
        ),
        ("SLN-SEQ-003", swap(&d, "<notes>GOES</notes>", "<content>time,flux</content>")),
        ("SLN-SEQ-004", {
            let full = format!("<full width=\"1\" height=\"1\">\n          <data>{RED_URI}</data>\n        </full>");
            let th = format!("{thumb}\n          <data>{RED_URI}</data>\n        </thumbnail>");
            swap(&d, &full, &th)
        }),
        (
            "SLN-SEQ-005",
            swap(&d, "<notes>placeholder</notes>", "<data>data:video/mp4;base64,AAAA</data>"),
        ),
        ("SLN-OCC-001", edit(&d, "<date>2014-09-05</date>", "")),
        ("SLN-OCC-002", edit(&d, "<date>2014-09-05</date>", "<date>2014-09-05</date><date>2014-09-05</date>")),
        ("SLN-ATT-001", edit(&d, " surname=\"Contact\"", "")),
        ("SLN-TYP-001", edit(&d, "<text>check NOAA plots</text>", "<text/>")),
        ("SLN-TYP-002", edit(&d, "<date>2014-09-05</date>", "<date>2014-02-30</date>")),
        ("SLN-TYP-003", edit(&d, thumb, "<thumbnail width=\"0\" height=\"1\">")),
        ("SLN-TYP-004", edit(&d, "done=\"false\"", "done=\"maybe\"")),
        ("SLN-TYP-005", edit(&d, "AAAA</data>", "Q!==</data>")),
        ("SLN-DIM-001", edit(&d, thumb, "<thumbnail width=\"2\" height=\"1\">")),
        ("SLN-UNK-001", edit(&d, "<date>2014-09-05</date>", "<date>2014-09-05</date><rating>5</rating>")),
        ("SLN-UNK-002", edit(&d, "<contact name=\"New\"", "<contact age=\"3\" name=\"New\"")),
        ("SLN-UNK-003", edit(&d, "<date>2014-09-05</date>", "<date>2014-09-05</date>stray")),
    ]
}

/// Alphabet for search cases, with its simple case folding written out by
/// hand: Latin, Greek final sigma, the Kelvin sign, long s and a Deseret
/// pair from the supplementary plane.
pub const SEARCH_ALPHABET: &[(char, char)] = &[
    ('a', 'a'),
    ('A', 'a'),
    ('b', 'b'),
    ('B', 'b'),
    ('k', 'k'),
    ('K', 'k'),
    ('\u{212A}', 'k'),
    ('s', 's'),
    ('S', 's'),
    ('\u{017F}', 's'),
    ('σ', 'σ'),
    ('Σ', 'σ'),
    ('ς', 'σ'),
    ('\u{10400}', '\u{10428}'),
    ('\u{10428}', '\u{10428}'),
    (' ', ' '),
    ('/', '/'),
];

fn fold_oracle(c: char) -> char {
    SEARCH_ALPHABET.iter().find(|(from, _)| *from == c).map_or(c, |(_, to)| *to)
}

fn search_word(rng: &mut impl rand::Rng, max: usize) -> String {
    let len = rng.random_range(0..=max);
    (0..len)
        .map(|_| SEARCH_ALPHABET[rng.random_range(0..SEARCH_ALPHABET.len())].0)
        .collect()
}

/// A random notebook over [`SEARCH_ALPHABET`] and a query that is either a
/// piece of some field or random text.
pub fn search_case(rng: &mut impl rand::Rng) -> (Notebook, String) {
    let n = rng.random_range(0..12);
    let date = Date::from_ymd(2014, 9, 5).expect("real date");
    let websites: Vec<WebsiteEntry> = (0..n)
        .map(|_| {
            let mut name = search_word(rng, 8);
            if name.is_empty() {
                name.push('a');
            }
            WebsiteEntry::new(name, search_word(rng, 10), search_word(rng, 12), date)
        })
        .collect();
    let query = if !websites.is_empty() && rng.random_bool(0.6) {
        let w = &websites[rng.random_range(0..websites.len())];
        let field: Vec<char> = [&w.name, &w.location, &w.purpose][rng.random_range(0..3)].chars().collect();
        let start = rng.random_range(0..=field.len());
        let end = rng.random_range(start..=field.len());
        field[start..end].iter().collect()
    } else {
        search_word(rng, 3)
    };
    (Notebook { websites, schema_location: None }, query)
}

/// Brute-force scan: (entry, field index, char offset of first match).
pub fn search_oracle(nb: &Notebook, query: &str) -> Vec<(usize, usize, usize)> {
    let needle: Vec<char> = query.chars().map(fold_oracle).collect();
    let mut out = Vec::new();
    for (i, w) in nb.websites.iter().enumerate() {
        for (f, text) in [&w.name, &w.location, &w.purpose].into_iter().enumerate() {
            let hay: Vec<char> = text.chars().map(fold_oracle).collect();
            if let Some(at) = (0..=hay.len()).find(|&s| hay.len() - s >= needle.len() && hay[s..s + needle.len()] == needle[..]) {
                out.push((i, f, at));
            }
        }
    }
    out
}
