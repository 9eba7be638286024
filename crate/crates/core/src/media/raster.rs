use std::fmt;
use std::io::Cursor;
use std::str::FromStr;

use super::{sniff_format, ImageFormat, MediaError, MAX_EDITOR_DIMENSION, THUMBNAIL_MAX_SIDE};
use crate::par::{self, Execution};

/// Row-major RGBA8 image.
#[derive(Clone, PartialEq, Eq)]
pub struct Raster {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl fmt::Debug for Raster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Raster")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl Raster {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self, MediaError> {
        if width == 0 || height == 0 {
            return Err(MediaError::InvalidRaster(format!("{width}x{height} has no pixels")));
        }
        let expected = width as usize * height as usize * 4;
        if pixels.len() != expected {
            return Err(MediaError::InvalidRaster(format!(
                "{width}x{height} needs {expected} bytes, got {}",
                pixels.len()
            )));
        }
        Ok(Raster { width, height, pixels })
    }

    pub fn filled(width: u32, height: u32, rgba: [u8; 4]) -> Self {
        let pixels = rgba.repeat(width as usize * height as usize);
        Raster::new(width, height, pixels).expect("non-empty fill")
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 4] {
        let i = (y as usize * self.width as usize + x as usize) * 4;
        self.pixels[i..i + 4].try_into().expect("4 channels")
    }

    /// Whether the editor may store this raster as a full-size image.
    pub fn within_editor_bounds(&self) -> bool {
        self.width <= MAX_EDITOR_DIMENSION && self.height <= MAX_EDITOR_DIMENSION
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CropRect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl CropRect {
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        CropRect { x, y, w, h }
    }

    fn fits(&self, width: u32, height: u32) -> bool {
        self.w >= 1
            && self.h >= 1
            && u64::from(self.x) + u64::from(self.w) <= u64::from(width)
            && u64::from(self.y) + u64::from(self.h) <= u64::from(height)
    }
}

impl FromStr for CropRect {
    type Err = String;

    /// `x,y,w,h`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<u32> = s
            .split(',')
            .map(|p| p.trim().parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("bad crop {s:?}: {e}"))?;
        match parts[..] {
            [x, y, w, h] => Ok(CropRect { x, y, w, h }),
            _ => Err(format!("bad crop {s:?}: expected x,y,w,h")),
        }
    }
}

/// The editor's fixed downscaling ratios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScaleFactor {
    Full,
    Half,
    Quarter,
    Eighth,
}

impl ScaleFactor {
    pub const ALL: [ScaleFactor; 4] = [ScaleFactor::Full, ScaleFactor::Half, ScaleFactor::Quarter, ScaleFactor::Eighth];

    pub fn divisor(self) -> u32 {
        match self {
            ScaleFactor::Full => 1,
            ScaleFactor::Half => 2,
            ScaleFactor::Quarter => 4,
            ScaleFactor::Eighth => 8,
        }
    }

    /// Output size for a `width`x`height` input.
    pub fn output_size(self, width: u32, height: u32) -> (u32, u32) {
        let k = self.divisor();
        ((width / k).max(1), (height / k).max(1))
    }
}

impl FromStr for ScaleFactor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1:1" => Ok(ScaleFactor::Full),
            "1:2" => Ok(ScaleFactor::Half),
            "1:4" => Ok(ScaleFactor::Quarter),
            "1:8" => Ok(ScaleFactor::Eighth),
            other => Err(format!("unsupported scale {other:?}; use 1:1, 1:2, 1:4 or 1:8")),
        }
    }
}

impl fmt::Display for ScaleFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1:{}", self.divisor())
    }
}

pub fn crop(raster: &Raster, rect: CropRect) -> Result<Raster, MediaError> {
    if !rect.fits(raster.width, raster.height) {
        return Err(MediaError::OutOfBounds {
            rect,
            width: raster.width,
            height: raster.height,
        });
    }
    let stride = raster.width as usize * 4;
    let row_len = rect.w as usize * 4;
    let mut pixels = Vec::with_capacity(row_len * rect.h as usize);
    for y in rect.y..rect.y + rect.h {
        let start = y as usize * stride + rect.x as usize * 4;
        pixels.extend_from_slice(&raster.pixels[start..start + row_len]);
    }
    Raster::new(rect.w, rect.h, pixels)
}

pub fn scale(raster: &Raster, factor: ScaleFactor) -> Raster {
    scale_with(raster, factor, Execution::default())
}

/// k x k box-filter downscale; trailing rows/columns that do not fill a
/// whole box are dropped unless the output would otherwise be empty.
pub fn scale_with(raster: &Raster, factor: ScaleFactor, exec: Execution) -> Raster {
    if factor == ScaleFactor::Full {
        return raster.clone();
    }
    let k = factor.divisor();
    let (ow, oh) = factor.output_size(raster.width, raster.height);
    let spans = |n: u32, len: u32| -> Vec<(u32, u32)> { (0..n).map(|i| (i * k, ((i + 1) * k).min(len))).collect() };
    resample(raster, &spans(ow, raster.width), &spans(oh, raster.height), exec)
}

/// Output size of [`make_thumbnail`] for a `width`x`height` input.
pub fn thumbnail_size(width: u32, height: u32) -> (u32, u32) {
    let bound = THUMBNAIL_MAX_SIDE;
    if width <= bound && height <= bound {
        return (width, height);
    }
    let fit = |short: u32, long: u32| -> u32 {
        let scaled = (u64::from(short) * u64::from(bound) + u64::from(long) / 2) / u64::from(long);
        (scaled as u32).max(1)
    };
    if width >= height {
        (bound, fit(height, width))
    } else {
        (fit(width, height), bound)
    }
}

pub fn make_thumbnail(raster: &Raster) -> Raster {
    make_thumbnail_with(raster, Execution::default())
}

/// Aspect-preserving box-filter reduction to at most
/// [`THUMBNAIL_MAX_SIDE`] on the longest side.
pub fn make_thumbnail_with(raster: &Raster, exec: Execution) -> Raster {
    let (tw, th) = thumbnail_size(raster.width, raster.height);
    if (tw, th) == (raster.width, raster.height) {
        return raster.clone();
    }
    let spans = |n: u32, len: u32| -> Vec<(u32, u32)> {
        let (n64, len64) = (u64::from(n), u64::from(len));
        (0..n64)
            .map(|i| ((i * len64 / n64) as u32, ((i + 1) * len64 / n64) as u32))
            .collect()
    };
    resample(raster, &spans(tw, raster.width), &spans(th, raster.height), exec)
}

/// Averages each output pixel over the source block `xs[i] x ys[j]`.
fn resample(src: &Raster, xs: &[(u32, u32)], ys: &[(u32, u32)], exec: Execution) -> Raster {
    let (ow, oh) = (xs.len(), ys.len());
    let stride = src.width as usize * 4;
    let mut out = vec![0u8; ow * oh * 4];
    par::for_each_chunk_mut(exec, &mut out, ow * 4, |oy, row| {
        let (y0, y1) = ys[oy];
        for (ox, &(x0, x1)) in xs.iter().enumerate() {
            let mut sum = [0u64; 4];
            for y in y0..y1 {
                let line = &src.pixels[y as usize * stride + x0 as usize * 4..y as usize * stride + x1 as usize * 4];
                for px in line.chunks_exact(4) {
                    for c in 0..4 {
                        sum[c] += u64::from(px[c]);
                    }
                }
            }
            let n = u64::from(y1 - y0) * u64::from(x1 - x0);
            for c in 0..4 {
                row[ox * 4 + c] = ((sum[c] + n / 2) / n) as u8;
            }
        }
    });
    Raster::new(ow as u32, oh as u32, out).expect("resample output is consistent")
}

/// Decodes PNG bytes to RGBA8. Other recognised formats are reported as
/// unsupported; they can still be embedded as opaque blobs.
pub fn decode_raster(bytes: &[u8]) -> Result<Raster, MediaError> {
    match sniff_format(bytes) {
        ImageFormat::Png => {}
        ImageFormat::Unknown => return Err(MediaError::CorruptImage("unrecognised image data".into())),
        other => return Err(MediaError::UnsupportedFormat(other)),
    }
    let corrupt = |e: png::DecodingError| MediaError::CorruptImage(e.to_string());
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::normalize_to_color8());
    let mut reader = decoder.read_info().map_err(corrupt)?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| MediaError::CorruptImage("image too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(corrupt)?;
    let data = &buf[..info.buffer_size()];
    let (w, h) = (info.width as usize, info.height as usize);
    let row = info.line_size;
    let mut pixels = Vec::with_capacity(w * h * 4);
    for line in data.chunks_exact(row).take(h) {
        match info.color_type {
            png::ColorType::Rgba => pixels.extend_from_slice(&line[..w * 4]),
            png::ColorType::Rgb => line[..w * 3]
                .chunks_exact(3)
                .for_each(|p| pixels.extend_from_slice(&[p[0], p[1], p[2], 255])),
            png::ColorType::GrayscaleAlpha => line[..w * 2]
                .chunks_exact(2)
                .for_each(|p| pixels.extend_from_slice(&[p[0], p[0], p[0], p[1]])),
            png::ColorType::Grayscale => line[..w].iter().for_each(|&g| pixels.extend_from_slice(&[g, g, g, 255])),
            png::ColorType::Indexed => {
                return Err(MediaError::CorruptImage("palette was not expanded".into()));
            }
        }
    }
    Raster::new(info.width, info.height, pixels)
}

pub fn encode_raster(raster: &Raster) -> Vec<u8> {
    let mut out = Vec::new();
    let mut encoder = png::Encoder::new(&mut out, raster.width, raster.height);
    encoder.set_color(png::ColorType::Rgba);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header().expect("in-memory PNG header");
    writer.write_image_data(&raster.pixels).expect("in-memory PNG data");
    writer.finish().expect("in-memory PNG trailer");
    out
}
