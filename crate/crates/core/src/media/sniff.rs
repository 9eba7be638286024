use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ImageFormat {
    Png,
    Jpeg,
    Gif,
    Bmp,
    Svg,
    Unknown,
}

impl ImageFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::Png => "png",
            ImageFormat::Jpeg => "jpg",
            ImageFormat::Gif => "gif",
            ImageFormat::Bmp => "bmp",
            ImageFormat::Svg => "svg",
            ImageFormat::Unknown => "bin",
        }
    }

    pub fn media_type(self) -> &'static str {
        match self {
            ImageFormat::Png => "image/png",
            ImageFormat::Jpeg => "image/jpeg",
            ImageFormat::Gif => "image/gif",
            ImageFormat::Bmp => "image/bmp",
            ImageFormat::Svg => "image/svg+xml",
            ImageFormat::Unknown => "application/octet-stream",
        }
    }
}

impl fmt::Display for ImageFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ImageFormat::Png => "PNG",
            ImageFormat::Jpeg => "JPEG",
            ImageFormat::Gif => "GIF",
            ImageFormat::Bmp => "BMP",
            ImageFormat::Svg => "SVG",
            ImageFormat::Unknown => "unknown format",
        };
        f.write_str(s)
    }
}

// How far into a text file we look for the root element.
const SVG_SCAN_LIMIT: usize = 4096;

/// Identifies an image by magic bytes, or by an `svg` root element for XML.
pub fn sniff_format(bytes: &[u8]) -> ImageFormat {
    match bytes {
        [0x89, b'P', b'N', b'G', ..] => ImageFormat::Png,
        [0xFF, 0xD8, 0xFF, ..] => ImageFormat::Jpeg,
        [b'G', b'I', b'F', b'8', b'7' | b'9', b'a', ..] => ImageFormat::Gif,
        [b'B', b'M', ..] => ImageFormat::Bmp,
        _ if svg_root(bytes) => ImageFormat::Svg,
        _ => ImageFormat::Unknown,
    }
}

fn svg_root(bytes: &[u8]) -> bool {
    let head = &bytes[..bytes.len().min(SVG_SCAN_LIMIT)];
    let head = head.strip_prefix(&[0xEF, 0xBB, 0xBF]).unwrap_or(head);
    let mut rest = head;
    loop {
        rest = rest.trim_ascii_start();
        if let Some(r) = rest.strip_prefix(b"<?") {
            rest = skip_past(r, b"?>");
        } else if let Some(r) = rest.strip_prefix(b"<!--") {
            rest = skip_past(r, b"-->");
        } else if let Some(r) = rest.strip_prefix(b"<!") {
            rest = skip_past(r, b">");
        } else if let Some(r) = rest.strip_prefix(b"<") {
            let name_len = r
                .iter()
                .position(|b| matches!(b, b' ' | b'\t' | b'\r' | b'\n' | b'>' | b'/'))
                .unwrap_or(r.len());
            let name = &r[..name_len];
            let local = name.rsplit(|&b| b == b':').next().unwrap_or(name);
            return name_len < r.len() && local == b"svg";
        } else {
            return false;
        }
    }
}

fn skip_past<'a>(bytes: &'a [u8], end: &[u8]) -> &'a [u8] {
    match memchr::memmem::find(bytes, end) {
        Some(i) => &bytes[i + end.len()..],
        None => &[],
    }
}
