//! Deterministic synthetic notebooks for load testing.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::media::{encode_raster, make_thumbnail_with, MediaType, Raster};
use crate::model::{Dataset, Date, ImageRecord, MediaBlob, WebsiteEntry, DEFAULT_SCHEMA_LOCATION};
use crate::par::{self, Execution};
use crate::xml::encode::{write_footer, write_header, write_website};
use crate::xml::StreamStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureSpec {
    pub website_count: u64,
    pub datasets_per_site: u32,
    /// Content length of every dataset, in bytes.
    pub dataset_bytes: u64,
    pub images_per_site: u32,
    pub image_width: u32,
    pub image_height: u32,
    pub seed: u64,
}

/// Ground truth for a generated file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureManifest {
    pub stats: StreamStats,
    pub file_bytes: u64,
}

const SITE_BUDGET: u64 = 4 * 1024 * 1024;
const SAMPLE_SIDE: u32 = 256;
const BATCH: u64 = 8;

impl FixtureSpec {
    /// A spec whose output is close to `target` bytes: roughly 4 MiB per
    /// website, each with one noise image and two CSV datasets sized to
    /// fill the remainder.
    pub fn for_target_bytes(target: u64, seed: u64) -> Self {
        let mut spec = FixtureSpec {
            website_count: 0,
            datasets_per_site: 2,
            dataset_bytes: 0,
            images_per_site: 1,
            image_width: SAMPLE_SIDE,
            image_height: SAMPLE_SIDE,
            seed,
        };
        if target <= frame_len(0) + 1024 {
            return spec;
        }
        spec.website_count = ((target as f64 / SITE_BUDGET as f64).round() as u64).max(1);
        let per_site = target.saturating_sub(frame_len(spec.website_count)) / spec.website_count;
        let mut overhead = render_site(&spec, 0).len() as u64;
        if overhead + 64 > per_site {
            spec.images_per_site = 0;
            overhead = render_site(&spec, 0).len() as u64;
        }
        spec.dataset_bytes = per_site.saturating_sub(overhead) / u64::from(spec.datasets_per_site);
        spec
    }
}

fn frame_len(website_count: u64) -> u64 {
    let mut v = Vec::new();
    let empty = website_count == 0;
    write_header(&mut v, Some(DEFAULT_SCHEMA_LOCATION), empty).expect("vec write");
    write_footer(&mut v, empty).expect("vec write");
    v.len() as u64
}

fn csv(rng: &mut ChaCha8Rng, len: u64) -> String {
    let len = len as usize;
    let mut s = String::with_capacity(len + 32);
    s.push_str("time,flux\n");
    let mut t = 0u64;
    while s.len() < len {
        let v: u32 = rng.random_range(0..1_000_000);
        let _ = writeln!(s, "{t},{}.{:04}", v / 10_000, v % 10_000);
        t += 60;
    }
    s.truncate(len);
    s
}

fn noise(rng: &mut ChaCha8Rng, width: u32, height: u32) -> Raster {
    let mut pixels = vec![0u8; width as usize * height as usize * 4];
    rng.fill(&mut pixels[..]);
    for px in pixels.chunks_exact_mut(4) {
        px[3] = 255;
    }
    Raster::new(width, height, pixels).expect("sized buffer")
}

fn build_site(spec: &FixtureSpec, index: u64) -> WebsiteEntry {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index);
    let day = rng.random_range(0..9000);
    let date = Date::from_ymd(2000, 1, 1)
        .and_then(|d| d.add_days(day))
        .expect("date in range");
    let mut site = WebsiteEntry::new(
        format!("Fixture site {index}"),
        format!("http://fixture.invalid/site/{index}"),
        "Synthetic load-test entry",
        date,
    );
    for k in 0..spec.datasets_per_site {
        site.datasets.push(Dataset {
            name: format!("series-{k}.csv"),
            notes: "generated".into(),
            content: csv(&mut rng, spec.dataset_bytes),
        });
    }
    let png: MediaType = "image/png".parse().expect("valid media type");
    for k in 0..spec.images_per_site {
        let full = noise(&mut rng, spec.image_width, spec.image_height);
        let thumb = make_thumbnail_with(&full, Execution::Sequential);
        site.images.push(ImageRecord {
            name: format!("noise-{k}"),
            notes: String::new(),
            related_url: None,
            full: MediaBlob::new(png.clone(), encode_raster(&full)),
            thumbnail: MediaBlob::new(png.clone(), encode_raster(&thumb)),
            full_width: full.width(),
            full_height: full.height(),
            thumb_width: thumb.width(),
            thumb_height: thumb.height(),
        });
    }
    site
}

fn site_stats(site: &WebsiteEntry) -> StreamStats {
    StreamStats {
        website_count: 1,
        dataset_bytes: site.datasets.iter().map(|d| d.content.len() as u64).sum(),
        image_count: site.images.len() as u64,
        total_media_bytes: site
            .images
            .iter()
            .map(|i| (i.full.payload.len() + i.thumbnail.payload.len()) as u64)
            .sum(),
    }
}

fn render_site(spec: &FixtureSpec, index: u64) -> Vec<u8> {
    render(spec, index).0
}

fn render(spec: &FixtureSpec, index: u64) -> (Vec<u8>, StreamStats) {
    let site = build_site(spec, index);
    let mut out = Vec::new();
    write_website(&mut out, &site).expect("vec write");
    (out, site_stats(&site))
}

struct Counting<W> {
    inner: W,
    bytes: u64,
}

impl<W: Write> Write for Counting<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.bytes += n as u64;
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

/// Writes the fixture described by `spec` to `sink`. Websites are rendered
/// in small batches, in parallel when `exec` allows, and written in order,
/// so output is identical for both schedules.
pub fn generate_fixture<W: Write>(spec: &FixtureSpec, sink: W, exec: Execution) -> io::Result<FixtureManifest> {
    let mut out = Counting { inner: sink, bytes: 0 };
    let empty = spec.website_count == 0;
    let mut stats = StreamStats::default();
    write_header(&mut out, Some(DEFAULT_SCHEMA_LOCATION), empty)?;
    let mut start = 0;
    while start < spec.website_count {
        let n = BATCH.min(spec.website_count - start);
        let rendered = par::map_range(exec, n as usize, |i| render(spec, start + i as u64));
        for (bytes, s) in rendered {
            out.write_all(&bytes)?;
            stats.website_count += s.website_count;
            stats.dataset_bytes += s.dataset_bytes;
            stats.image_count += s.image_count;
            stats.total_media_bytes += s.total_media_bytes;
        }
        start += n;
    }
    write_footer(&mut out, empty)?;
    out.flush()?;
    Ok(FixtureManifest {
        stats,
        file_bytes: out.bytes,
    })
}

pub fn generate_fixture_file(spec: &FixtureSpec, path: &Path, exec: Execution) -> io::Result<FixtureManifest> {
    let file = io::BufWriter::with_capacity(1 << 20, File::create(path)?);
    generate_fixture(spec, file, exec)
}
