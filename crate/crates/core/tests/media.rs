mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sln_core::media::{
    crop, decode_data_uri, decode_raster, encode_data_uri, encode_raster, make_thumbnail, scale, scale_with,
    sniff_format, thumbnail_size, CropRect, DataUriScanner, ImageFormat, MediaError, Raster, ScaleFactor,
};
use sln_core::Execution;

fn random_raster(rng: &mut ChaCha8Rng, w: u32, h: u32) -> Raster {
    let mut px = vec![0u8; (w * h * 4) as usize];
    rng.fill_bytes(&mut px);
    Raster::new(w, h, px).unwrap()
}

/// Direct box average over the source block of output pixel (i, j),
/// rounding halves up.
fn box_oracle(src: &Raster, k: u32, i: u32, j: u32) -> [u8; 4] {
    let x1 = ((i + 1) * k).min(src.width());
    let y1 = ((j + 1) * k).min(src.height());
    let mut sum = [0u32; 4];
    let mut n = 0;
    for y in j * k..y1 {
        for x in i * k..x1 {
            let p = src.pixel(x, y);
            for c in 0..4 {
                sum[c] += u32::from(p[c]);
            }
            n += 1;
        }
    }
    sum.map(|s| ((2 * s + n) / (2 * n)) as u8)
}

fn expected_size(w: u32, h: u32, k: u32) -> (u32, u32) {
    let dim = |n: u32| if n < k { 1 } else { n / k };
    (dim(w), dim(h))
}

#[test]
fn data_uri_examples() {
    assert_eq!(encode_data_uri("text/plain", b"A").unwrap(), "data:text/plain;base64,QQ==");
    assert_eq!(base64_oracle(b"A"), "QQ==");
    assert_eq!(encode_data_uri("image/png", b"").unwrap(), "data:image/png;base64,");
    let (mt, bytes) = decode_data_uri("data:text/plain;base64,QQ==").unwrap();
    assert_eq!((mt.as_str(), bytes.as_slice()), ("text/plain", &b"A"[..]));
    for bad in [
        "data:text/plain;base64,Q!==",
        "text/plain;base64,QQ==",
        "data:text/plain,QQ==",
        "data:text/plain;base64,QQ=",
        "data:text/plain;base64,QR==",
        "data:text/plain;base64,Q===",
        "data:text/plain;base64,QQ==QQ==",
        "data:text/plain;base64,QQ ==",
        "data:;base64,QQ==",
    ] {
        assert!(matches!(decode_data_uri(bad), Err(MediaError::MalformedDataUri(_))), "{bad}");
    }
    for bad in ["", "png", "image/", "/png", "image/p ng", "image/png;q"] {
        assert!(matches!(encode_data_uri(bad, b"x"), Err(MediaError::BadMediaType(_))), "{bad}");
    }
}

#[test]
fn fixture_png_survives_a_data_uri() {
    let uri = encode_data_uri("image/png", RED_1X1_PNG).unwrap();
    assert_eq!(uri, format!("data:image/png;base64,{}", base64_oracle(RED_1X1_PNG)));
    let (mt, bytes) = decode_data_uri(&uri).unwrap();
    assert_eq!(mt.as_str(), "image/png");
    assert_eq!(bytes, RED_1X1_PNG);
}

#[test]
fn fixture_png_decodes_to_one_red_pixel() {
    let r = decode_raster(RED_1X1_PNG).unwrap();
    assert_eq!((r.width(), r.height()), (1, 1));
    assert_eq!(r.pixels(), [255, 0, 0, 255]);
    assert_eq!(decode_raster(&encode_raster(&r)).unwrap(), r);
}

#[test]
fn data_uri_round_trip_against_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let types = ["application/octet-stream", "image/png", "text/plain;charset=utf-8", "video/mp4"];
    for case in 0..10_000 {
        let len = rng.random_range(0..200);
        let mut bytes = vec![0u8; len];
        rng.fill_bytes(&mut bytes);
        let mt = types[case % types.len()];
        let uri = encode_data_uri(mt, &bytes).unwrap();
        assert_eq!(uri, format!("data:{mt};base64,{}", base64_oracle(&bytes)));
        let (back_mt, back) = decode_data_uri(&uri).unwrap();
        assert_eq!(back_mt.as_str(), mt);
        assert_eq!(back, bytes);
    }
}

#[test]
fn sniffing() {
    assert_eq!(sniff_format(&[0x89, 0x50, 0x4E, 0x47, 0x0D, 0x0A, 0x1A, 0x0A]), ImageFormat::Png);
    assert_eq!(sniff_format(RED_1X1_PNG), ImageFormat::Png);
    assert_eq!(sniff_format(&[0xFF, 0xD8, 0xFF, 0xE0]), ImageFormat::Jpeg);
    assert_eq!(sniff_format(b"GIF89a...."), ImageFormat::Gif);
    assert_eq!(sniff_format(b"BM\x3a\x00\x00\x00"), ImageFormat::Bmp);
    assert_eq!(sniff_format(b"<svg xmlns=\"http://www.w3.org/2000/svg\"/>"), ImageFormat::Svg);
    assert_eq!(
        sniff_format(b"<?xml version=\"1.0\"?>\n<!-- c -->\n<svg xmlns=\"http://www.w3.org/2000/svg\"/>"),
        ImageFormat::Svg
    );
    assert_eq!(sniff_format(b"<html/>"), ImageFormat::Unknown);
    assert_eq!(sniff_format(b""), ImageFormat::Unknown);
    assert!(matches!(
        decode_raster(&[0xFF, 0xD8, 0xFF, 0xE0, 0, 0]),
        Err(MediaError::UnsupportedFormat(ImageFormat::Jpeg))
    ));
}

#[test]
fn crop_examples() {
    let big = Raster::filled(2048, 2048, [1, 2, 3, 4]);
    assert_eq!(crop(&big, CropRect::new(0, 0, 2048, 2048)).unwrap(), big);
    for rect in [CropRect::new(1, 0, 2048, 1), CropRect::new(0, 2000, 1, 49), CropRect::new(0, 0, 0, 1)] {
        assert!(matches!(crop(&big, rect), Err(MediaError::OutOfBounds { .. })));
    }
    let board: Vec<u8> = (0..16u32)
        .flat_map(|i| if (i % 4 + i / 4) % 2 == 0 { [0, 0, 0, 255] } else { [255, 255, 255, 255] })
        .collect();
    let board = Raster::new(4, 4, board).unwrap();
    let c = crop(&board, CropRect::new(1, 1, 2, 2)).unwrap();
    for j in 0..2 {
        for i in 0..2 {
            assert_eq!(c.pixel(i, j), board.pixel(1 + i, 1 + j));
        }
    }
    assert_eq!(c.pixel(0, 0), [0, 0, 0, 255]);
    assert_eq!(c.pixel(1, 0), [255, 255, 255, 255]);
}

#[test]
fn editor_sizes_at_each_ratio() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let src = random_raster(&mut rng, 2048, 2048);
    for (f, side) in [(ScaleFactor::Half, 1024), (ScaleFactor::Quarter, 512), (ScaleFactor::Eighth, 256)] {
        let out = scale(&src, f);
        assert_eq!((out.width(), out.height()), (side, side));
        assert_eq!(out, scale_with(&src, f, Execution::Sequential));
        assert_eq!(out.pixel(3, 5), box_oracle(&src, f.divisor(), 3, 5));
    }
    assert_eq!(scale(&src, ScaleFactor::Full), src);
    let thumb = make_thumbnail(&src);
    assert_eq!((thumb.width(), thumb.height()), (128, 128));
}

#[test]
fn scale_dimension_law_over_the_editor_range() {
    for w in 1..=2048 {
        for h in 1..=2048 {
            for f in ScaleFactor::ALL {
                assert_eq!(f.output_size(w, h), expected_size(w, h, f.divisor()));
            }
        }
    }
    let grid = [1u32, 2, 3, 7, 8, 9, 15, 16, 17, 255, 256, 257, 1023, 1024, 1025, 2047, 2048];
    for &w in &grid {
        for &h in &grid {
            let src = Raster::filled(w, h, [9, 8, 7, 6]);
            for f in ScaleFactor::ALL {
                let out = scale(&src, f);
                assert_eq!((out.width(), out.height()), expected_size(w, h, f.divisor()), "{w}x{h} {f}");
                assert!(out.pixels().chunks_exact(4).all(|p| p == [9, 8, 7, 6]));
            }
        }
    }
}

#[test]
fn scale_pixels_match_the_box_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for w in 1..=24 {
        for h in 1..=24 {
            let src = random_raster(&mut rng, w, h);
            for f in ScaleFactor::ALL {
                let out = scale(&src, f);
                let k = f.divisor();
                for j in 0..out.height() {
                    for i in 0..out.width() {
                        let want = if k == 1 { src.pixel(i, j) } else { box_oracle(&src, k, i, j) };
                        assert_eq!(out.pixel(i, j), want, "{w}x{h} {f} at {i},{j}");
                    }
                }
            }
        }
    }
}

#[test]
fn thumbnail_examples() {
    assert_eq!(thumbnail_size(2048, 1024), (128, 64));
    assert_eq!(thumbnail_size(2048, 2048), (128, 128));
    assert_eq!(thumbnail_size(100, 50), (100, 50));
    let small = Raster::filled(100, 50, [1, 1, 1, 1]);
    assert_eq!(make_thumbnail(&small), small);
    let wide = Raster::filled(2048, 1024, [50, 60, 70, 255]);
    let t = make_thumbnail(&wide);
    assert_eq!((t.width(), t.height()), (128, 64));
    assert!(t.pixels().chunks_exact(4).all(|p| p == [50, 60, 70, 255]));
}

#[test]
fn thumbnail_bound_and_aspect_over_the_editor_range() {
    for w in (1..=2048).step_by(7).chain([2048]) {
        for h in (1..=2048).step_by(13).chain([2048]) {
            let (tw, th) = thumbnail_size(w, h);
            assert!(tw.max(th) <= 128 && tw >= 1 && th >= 1);
            if w.max(h) > 128 {
                assert_eq!(tw.max(th), 128);
            }
            // Exact aspect would give tw * h == th * w; allow one pixel of rounding.
            let err = (i64::from(tw) * i64::from(h) - i64::from(th) * i64::from(w)).abs();
            assert!(err <= i64::from(w.max(h)), "{w}x{h} -> {tw}x{th}");
            assert_eq!(thumbnail_size(tw, th), (tw, th));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn crop_composes(
        (w, h, x1, y1, w1, h1, x2, y2, w2, h2) in (1u32..40, 1u32..40)
            .prop_flat_map(|(w, h)| (Just(w), Just(h), 0..w, 0..h))
            .prop_flat_map(|(w, h, x1, y1)| (Just(w), Just(h), Just(x1), Just(y1), 1..=w - x1, 1..=h - y1))
            .prop_flat_map(|(w, h, x1, y1, w1, h1)| {
                (Just(w), Just(h), Just(x1), Just(y1), Just(w1), Just(h1), 0..w1, 0..h1)
            })
            .prop_flat_map(|(w, h, x1, y1, w1, h1, x2, y2)| {
                (Just(w), Just(h), Just(x1), Just(y1), Just(w1), Just(h1), Just(x2), Just(y2), 1..=w1 - x2, 1..=h1 - y2)
            }),
        seed in any::<u64>(),
    ) {
        let src = random_raster(&mut ChaCha8Rng::seed_from_u64(seed), w, h);
        let twice = crop(&crop(&src, CropRect::new(x1, y1, w1, h1)).unwrap(), CropRect::new(x2, y2, w2, h2)).unwrap();
        let once = crop(&src, CropRect::new(x1 + x2, y1 + y2, w2, h2)).unwrap();
        prop_assert_eq!(twice, once);
    }

    #[test]
    fn png_codec_is_lossless(w in 1u32..32, h in 1u32..32, seed in any::<u64>()) {
        let r = random_raster(&mut ChaCha8Rng::seed_from_u64(seed), w, h);
        prop_assert_eq!(decode_raster(&encode_raster(&r)).unwrap(), r);
    }

    #[test]
    fn scanner_agrees_with_decoder(bytes in prop::collection::vec(any::<u8>(), 0..300), cuts in prop::collection::vec(0usize..400, 0..6), corrupt in prop::option::of((0usize..400, prop::sample::select(&['!', '=', ' ', 'A', '-'][..])))) {
        let mut uri = encode_data_uri("application/octet-stream", &bytes).unwrap();
        if let Some((at, c)) = corrupt {
            let at = at % uri.len();
            uri.replace_range(at..at + 1, &c.to_string());
        }
        let mut scanner = DataUriScanner::new();
        let mut cuts: Vec<usize> = cuts.into_iter().map(|c| c % (uri.len() + 1)).collect();
        cuts.sort();
        let mut last = 0;
        for c in cuts.into_iter().chain([uri.len()]) {
            scanner.feed(&uri[last..c]);
            last = c;
        }
        match decode_data_uri(&uri) {
            Ok((_, decoded)) => prop_assert_eq!(scanner.finish(), Ok(decoded.len() as u64)),
            Err(_) => prop_assert!(scanner.finish().is_err()),
        }
    }
}
