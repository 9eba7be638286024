use std::fmt;
use std::io::{self, Write};

use base64::engine::general_purpose::STANDARD;
use base64::write::EncoderWriter;
use base64::Engine;

use super::{MediaError, MediaType};

const MARKER: &str = ";base64,";

/// `data:<media_type>;base64,<payload>` with a padded standard-alphabet
/// payload and no line breaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataUri {
    pub media_type: MediaType,
    pub base64: String,
}

impl DataUri {
    pub fn new(media_type: MediaType, bytes: &[u8]) -> Self {
        DataUri {
            media_type,
            base64: STANDARD.encode(bytes),
        }
    }

    pub fn decode(&self) -> Result<Vec<u8>, MediaError> {
        STANDARD
            .decode(&self.base64)
            .map_err(|e| MediaError::MalformedDataUri(e.to_string()))
    }
}

impl fmt::Display for DataUri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "data:{}{MARKER}{}", self.media_type, self.base64)
    }
}

impl std::str::FromStr for DataUri {
    type Err = MediaError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let malformed = |why: &str| MediaError::MalformedDataUri(why.to_owned());
        let rest = text.strip_prefix("data:").ok_or_else(|| malformed("missing \"data:\" prefix"))?;
        let comma = rest.find(',').ok_or_else(|| malformed("missing ',' before payload"))?;
        let header = &rest[..comma];
        let media_type = header
            .strip_suffix(";base64")
            .ok_or_else(|| malformed("missing \";base64\" marker"))?
            .parse::<MediaType>()
            .map_err(|_| malformed("invalid media type"))?;
        let uri = DataUri {
            media_type,
            base64: rest[comma + 1..].to_owned(),
        };
        uri.decode()?;
        Ok(uri)
    }
}

pub fn encode_data_uri(media_type: &str, bytes: &[u8]) -> Result<String, MediaError> {
    let media_type: MediaType = media_type.parse()?;
    Ok(DataUri::new(media_type, bytes).to_string())
}

pub fn decode_data_uri(text: &str) -> Result<(MediaType, Vec<u8>), MediaError> {
    let uri: DataUri = text.parse()?;
    let bytes = uri.decode()?;
    Ok((uri.media_type, bytes))
}

/// Streams a data URI into `out` without materialising the base64 text.
pub(crate) fn write_data_uri<W: Write + ?Sized>(out: &mut W, media_type: &MediaType, bytes: &[u8]) -> io::Result<()> {
    write!(out, "data:{media_type}{MARKER}")?;
    let mut enc = EncoderWriter::new(out, &STANDARD);
    enc.write_all(bytes)?;
    enc.finish()?;
    Ok(())
}

/// Incremental data-URI checker. Feed the text in arbitrary chunks; it keeps
/// only the header and a few bytes of state, so payload size does not
/// affect memory use. Acceptance matches [`decode_data_uri`].
#[derive(Debug, Default)]
pub struct DataUriScanner {
    header: String,
    in_payload: bool,
    chars: u64,
    padding: u8,
    last_value: u8,
    error: Option<String>,
}

const MAX_HEADER: usize = 1024;

fn sextet(b: u8) -> Option<u8> {
    match b {
        b'A'..=b'Z' => Some(b - b'A'),
        b'a'..=b'z' => Some(b - b'a' + 26),
        b'0'..=b'9' => Some(b - b'0' + 52),
        b'+' => Some(62),
        b'/' => Some(63),
        _ => None,
    }
}

impl DataUriScanner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn feed(&mut self, chunk: &str) {
        if self.error.is_some() {
            return;
        }
        let mut bytes = chunk.as_bytes();
        if !self.in_payload {
            match memchr::memchr(b',', bytes) {
                Some(i) => {
                    self.header.push_str(&chunk[..i]);
                    bytes = &bytes[i + 1..];
                    self.in_payload = true;
                    self.check_header();
                    if self.error.is_some() {
                        return;
                    }
                }
                None => {
                    self.header.push_str(chunk);
                    if self.header.len() > MAX_HEADER {
                        self.error = Some("data URI header too long".into());
                    }
                    return;
                }
            }
        }
        for &b in bytes {
            if b == b'=' {
                self.padding += 1;
                if self.padding > 2 {
                    self.error = Some("too much padding".into());
                    return;
                }
            } else if let Some(v) = sextet(b) {
                if self.padding > 0 {
                    self.error = Some("data after padding".into());
                    return;
                }
                self.last_value = v;
            } else {
                self.error = Some(format!("invalid base64 character {:?}", b as char));
                return;
            }
            self.chars += 1;
        }
    }

    fn check_header(&mut self) {
        let header = &self.header;
        let Some(rest) = header.strip_prefix("data:") else {
            self.error = Some("missing \"data:\" prefix".into());
            return;
        };
        match rest.strip_suffix(";base64") {
            Some(mt) if mt.parse::<MediaType>().is_ok() => {}
            Some(_) => self.error = Some("invalid media type".into()),
            None => self.error = Some("missing \";base64\" marker".into()),
        }
    }

    /// Number of decoded payload bytes, or the first problem found.
    pub fn finish(&self) -> Result<u64, String> {
        if let Some(e) = &self.error {
            return Err(e.clone());
        }
        if !self.in_payload {
            return Err(if self.header.starts_with("data:") {
                "missing ',' before payload".into()
            } else {
                "missing \"data:\" prefix".into()
            });
        }
        if self.chars % 4 != 0 {
            return Err("payload length is not a multiple of 4".into());
        }
        let trailing_bits_clear = match self.padding {
            1 => self.last_value & 0b11 == 0,
            2 => self.last_value & 0b1111 == 0,
            _ => true,
        };
        if !trailing_bits_clear {
            return Err("non-canonical trailing bits".into());
        }
        Ok(self.chars / 4 * 3 - u64::from(self.padding))
    }
}
