//! Embedded media: data URIs, format sniffing and the raster operations
//! behind the image editor (crop, fixed-ratio scaling, thumbnails).

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub(crate) mod datauri;
mod raster;
mod sniff;

pub use datauri::{decode_data_uri, encode_data_uri, DataUri, DataUriScanner};
pub use raster::{
    crop, decode_raster, encode_raster, make_thumbnail, make_thumbnail_with, scale, scale_with, thumbnail_size, CropRect, Raster,
    ScaleFactor,
};
pub use sniff::{sniff_format, ImageFormat};

/// Largest width or height the image editor stores.
pub const MAX_EDITOR_DIMENSION: u32 = 2048;

/// Longest side of an automatically generated thumbnail.
pub const THUMBNAIL_MAX_SIDE: u32 = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MediaError {
    #[error("bad media type {0:?}: expected type/subtype")]
    BadMediaType(String),
    #[error("malformed data URI: {0}")]
    MalformedDataUri(String),
    #[error("crop rectangle {rect:?} does not fit a {width}x{height} image")]
    OutOfBounds { rect: CropRect, width: u32, height: u32 },
    #[error("pixel operations need PNG input, got {0}")]
    UnsupportedFormat(ImageFormat),
    #[error("corrupt image: {0}")]
    CorruptImage(String),
    #[error("invalid raster: {0}")]
    InvalidRaster(String),
}

/// MIME type of the form `type/subtype` with optional `;name=value`
/// parameters, every part an RFC 2045 token.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MediaType(String);

impl MediaType {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// `type/subtype` without parameters.
    pub fn essence(&self) -> &str {
        self.0.split(';').next().unwrap_or_default()
    }
}

fn is_token(s: &str) -> bool {
    !s.is_empty()
        && s.bytes()
            .all(|b| b.is_ascii_graphic() && !b"()<>@,;:\\\"/[]?=".contains(&b))
}

impl FromStr for MediaType {
    type Err = MediaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MediaError::BadMediaType(s.to_owned());
        let mut parts = s.split(';');
        let essence = parts.next().ok_or_else(bad)?;
        let (ty, sub) = essence.split_once('/').ok_or_else(bad)?;
        if !is_token(ty) || !is_token(sub) {
            return Err(bad());
        }
        for param in parts {
            let (k, v) = param.split_once('=').ok_or_else(bad)?;
            if !is_token(k) || !is_token(v) {
                return Err(bad());
            }
        }
        Ok(MediaType(s.to_owned()))
    }
}

impl fmt::Display for MediaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}
