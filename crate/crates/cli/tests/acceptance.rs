//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Tolerances are fixed constants below.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode, Stdio};
use std::time::{Duration, Instant};

use common::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sln_core::media::{decode_data_uri, encode_data_uri, scale, Raster, ScaleFactor};
use sln_core::ops::{generate_fixture_file, FixtureSpec};
use sln_core::schema::{find_rule, rule_catalogue, validate, SchemaConstruct};
use sln_core::search::{Field, SearchIndex, SearchSession};
use sln_core::xml::{parse_notebook_slice, serialize_to_vec};
use sln_core::Execution;

const SAMPLE_BUDGET: Duration = Duration::from_secs(1);
const ROUND_TRIP_CASES: u32 = 1000;
const DATA_URI_CASES: usize = 10_000;
const SEARCH_CASES: usize = 1000;
const LARGE_TARGET: u64 = 400 * 1000 * 1000;
const LARGE_BUDGET: Duration = Duration::from_secs(15);
const LARGE_RSS_LIMIT_KB: i64 = 512 * 1024;
const SMALL_TARGET: u64 = 40 * 1000 * 1000;
const SMALL_BUDGET: Duration = Duration::from_millis(1500);
const MEMORY_GROWTH_LIMIT: f64 = 2.0;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sample_fidelity() -> Check {
    let start = Instant::now();
    let nb = parse_notebook_slice(SAMPLE.as_bytes()).map_err(|e| e.to_string())?;
    ensure(nb.websites.len() == 1, || format!("{} websites", nb.websites.len()))?;
    let w = &nb.websites[0];
    ensure(w.name == "Latest SOHO Images", || format!("name {:?}", w.name))?;
    ensure(w.purpose == "SOHO remote sensing data", || format!("purpose {:?}", w.purpose))?;
    ensure(w.date.to_string() == "2014-09-05", || format!("date {}", w.date))?;
    ensure(w.related.len() == 4, || format!("{} related urls", w.related.len()))?;
    ensure(w.contacts.len() == 1, || format!("{} contacts", w.contacts.len()))?;
    ensure(nb == sample_notebook(), || "differs from the hand transcription".into())?;
    let report = validate(SAMPLE.as_bytes()).map_err(|e| e.to_string())?;
    ensure(report.findings.is_empty(), || report.to_text())?;
    let once = serialize_to_vec(&nb);
    let twice = serialize_to_vec(&parse_notebook_slice(&once).map_err(|e| e.to_string())?);
    ensure(once == twice, || "second serialization differs".into())?;
    let elapsed = start.elapsed();
    ensure(elapsed < SAMPLE_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("1 website, 4 related, 1 contact, 0 findings, stable bytes, {elapsed:?} < {SAMPLE_BUDGET:?}"))
}

fn construct_of(report: &sln_core::schema::ValidationReport) -> Vec<SchemaConstruct> {
    report
        .findings
        .iter()
        .map(|f| find_rule(&f.rule_id).expect("catalogued").schema_construct)
        .collect()
}

fn mutation_suite() -> Check {
    let check = |src: &str| validate(src.as_bytes()).map_err(|e| e.to_string());
    let r = check(&SAMPLE.replace(" surname=\"Contact\"", ""))?;
    ensure(
        construct_of(&r) == [SchemaConstruct::RequiredAttribute] && r.findings[0].path.ends_with("/contacts/contact"),
        || format!("surname deleted: {}", r.to_text()),
    )?;
    let r = check(&SAMPLE.replace(
        "<email>email@nasa.gov</email>\n      <webpage>nasa.gov</webpage>",
        "<webpage>nasa.gov</webpage>\n      <email>email@nasa.gov</email>",
    ))?;
    ensure(construct_of(&r) == [SchemaConstruct::SequenceOrder], || format!("reordered: {}", r.to_text()))?;
    let contact = &SAMPLE[SAMPLE.find("<contact ").unwrap()..SAMPLE.find("</contacts>").unwrap()];
    let r = check(&SAMPLE.replace(contact, &contact.repeat(3)))?;
    ensure(r.findings.is_empty(), || format!("duplicated contact: {}", r.to_text()))?;
    let r = check(&SAMPLE.replace("<purpose>", "<purpose xmlns=\"\">"))?;
    ensure(construct_of(&r) == [SchemaConstruct::NamespaceQualified], || format!("unqualified: {}", r.to_text()))?;
    let mutants = mutants();
    for (rule, doc) in &mutants {
        let r = check(doc)?;
        ensure(r.rule_ids() == [*rule] && r.findings.len() == 1, || format!("{rule} mutant: {}", r.to_text()))?;
    }
    let catalogue = rule_catalogue().len();
    ensure(mutants.len() == catalogue, || format!("{} mutants for {catalogue} rules", mutants.len()))?;
    Ok(format!("4 sample-document mutants; {catalogue}/{catalogue} rules each isolated by a mutant"))
}

fn round_trip() -> Check {
    let config = Config {
        cases: ROUND_TRIP_CASES,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let generated = std::cell::Cell::new(0u32);
    let outcome = runner.run(&notebook(), |nb| {
        generated.set(generated.get() + 1);
        let bytes = serialize_to_vec(&nb);
        let back = parse_notebook_slice(&bytes).map_err(|e| proptest::test_runner::TestCaseError::fail(e.to_string()))?;
        proptest::prop_assert_eq!(&back, &nb);
        let report = validate(bytes.as_slice()).expect("own output is well-formed");
        proptest::prop_assert!(report.findings.is_empty(), "{}", report.to_text());
        Ok(())
    });
    outcome.map_err(|e| e.to_string())?;
    let generated = generated.get();
    ensure(generated >= ROUND_TRIP_CASES, || format!("only {generated} cases ran"))?;
    Ok(format!("{generated} generated notebooks, 0 failures"))
}

fn media_laws() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..DATA_URI_CASES {
        let mut bytes = vec![0u8; rng.random_range(0..256)];
        rng.fill_bytes(&mut bytes);
        let uri = encode_data_uri("application/octet-stream", &bytes).map_err(|e| e.to_string())?;
        ensure(uri["data:application/octet-stream;base64,".len()..] == base64_oracle(&bytes), || {
            format!("encoding of {bytes:?} disagrees with the oracle")
        })?;
        let (_, back) = decode_data_uri(&uri).map_err(|e| e.to_string())?;
        ensure(back == bytes, || format!("{uri} did not round-trip"))?;
    }
    let mut grid = 0u64;
    for w in 1..=2048u32 {
        for h in 1..=2048u32 {
            for f in ScaleFactor::ALL {
                let k = f.divisor();
                let want = (if w < k { 1 } else { w / k }, if h < k { 1 } else { h / k });
                ensure(f.output_size(w, h) == want, || format!("{w}x{h} at {f}"))?;
                grid += 1;
            }
        }
    }
    let sample = [1u32, 2, 3, 7, 8, 9, 255, 256, 1023, 1024, 2047, 2048];
    for &w in &sample {
        for &h in &sample {
            let src = Raster::filled(w, h, [7, 7, 7, 255]);
            for f in ScaleFactor::ALL {
                let out = scale(&src, f);
                ensure((out.width(), out.height()) == f.output_size(w, h), || format!("scaled {w}x{h} at {f}"))?;
            }
        }
    }
    let big = Raster::filled(2048, 2048, [1, 2, 3, 255]);
    for (f, side) in [(ScaleFactor::Half, 1024), (ScaleFactor::Quarter, 512), (ScaleFactor::Eighth, 256)] {
        let out = scale(&big, f);
        ensure((out.width(), out.height()) == (side, side), || format!("2048 at {f}"))?;
    }
    Ok(format!(
        "{DATA_URI_CASES} data URIs match the oracle and round-trip; {grid} (w,h,k) grid points; 2048 -> 1024/512/256"
    ))
}

fn search_oracle_check() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2014);
    let mut extensions = 0u64;
    for case in 0..SEARCH_CASES {
        let (nb, q) = search_case(&mut rng);
        let index = SearchIndex::build(&nb);
        let got: Vec<(usize, usize, usize)> = index
            .query(&q)
            .iter()
            .map(|h| (h.entry, Field::ALL.iter().position(|f| *f == h.field).unwrap(), h.offset))
            .collect();
        ensure(got == search_oracle(&nb, &q), || format!("case {case}: query {q:?}"))?;
        let mut session = SearchSession::new(&index);
        let mut typed = String::new();
        let mut previous: Vec<usize> = (0..nb.websites.len()).collect();
        for c in q.chars().chain(SEARCH_ALPHABET.iter().take(4).map(|p| p.0)) {
            typed.push(c);
            let ids = index.entry_ids(&typed);
            ensure(ids.iter().all(|i| previous.contains(i)), || format!("case {case}: {typed:?} widened"))?;
            ensure(session.update(&typed) == index.query(&typed), || format!("case {case}: session {typed:?}"))?;
            previous = ids;
            extensions += 1;
        }
    }
    Ok(format!("{SEARCH_CASES} (notebook, query) pairs equal the brute-force scan; narrowing held over {extensions} extensions"))
}

struct Run {
    elapsed: Duration,
    max_rss_kb: i64,
}

fn run_measured(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Result<Run, String> {
    let start = Instant::now();
    let child = Command::new(env!("CARGO_BIN_EXE_sln"))
        .args(args.iter().map(|a| a.as_ref()))
        .stdout(Stdio::null())
        .spawn()
        .map_err(|e| e.to_string())?;
    let mut status = 0;
    // SAFETY: rusage is plain data, and the pid is our unreaped child.
    let mut usage: libc::rusage = unsafe { std::mem::zeroed() };
    let pid = unsafe { libc::wait4(child.id() as libc::pid_t, &mut status, 0, &mut usage) };
    let elapsed = start.elapsed();
    ensure(pid > 0, || "wait4 failed".into())?;
    ensure(libc::WIFEXITED(status) && libc::WEXITSTATUS(status) == 0, || format!("exit status {status}"))?;
    Ok(Run {
        elapsed,
        max_rss_kb: usage.ru_maxrss,
    })
}

/// Runs `stats` and `validate --lenient` on a fresh fixture of `target`
/// bytes; returns total wall time and the larger peak RSS.
fn measure(dir: &Path, target: u64) -> Result<(u64, Duration, i64), String> {
    let path = dir.join(format!("fixture-{target}.sln"));
    let spec = FixtureSpec::for_target_bytes(target, 2014);
    let manifest = generate_fixture_file(&spec, &path, Execution::default()).map_err(|e| e.to_string())?;
    let stats = run_measured(&[&"stats", &path])?;
    let valid = run_measured(&[&"validate", &"--lenient", &path])?;
    fs::remove_file(&path).map_err(|e| e.to_string())?;
    Ok((
        manifest.file_bytes,
        stats.elapsed + valid.elapsed,
        stats.max_rss_kb.max(valid.max_rss_kb),
    ))
}

fn performance() -> Check {
    let dir = tempfile::tempdir_in(env!("CARGO_TARGET_TMPDIR")).map_err(|e| e.to_string())?;
    let (small_bytes, small_time, small_rss) = measure(dir.path(), SMALL_TARGET)?;
    let (large_bytes, large_time, large_rss) = measure(dir.path(), LARGE_TARGET)?;
    let growth = large_rss as f64 / small_rss as f64;
    let detail = format!(
        "{:.0} MB: {large_time:.2?}, peak {} MB; {:.0} MB: {small_time:.2?}, peak {} MB; memory growth {growth:.2}x",
        large_bytes as f64 / 1e6,
        large_rss / 1024,
        small_bytes as f64 / 1e6,
        small_rss / 1024,
    );
    let ok = large_time <= LARGE_BUDGET
        && large_rss <= LARGE_RSS_LIMIT_KB
        && small_time <= SMALL_BUDGET
        && growth < MEMORY_GROWTH_LIMIT;
    if ok {
        Ok(detail)
    } else {
        Err(format!(
            "{detail} (limits: {LARGE_BUDGET:?}, {} MB, {SMALL_BUDGET:?}, {MEMORY_GROWTH_LIMIT}x)",
            LARGE_RSS_LIMIT_KB / 1024
        ))
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 6] = [
        ("sample-document-fidelity", sample_fidelity),
        ("schema-mutation-suite", mutation_suite),
        ("round-trip-property", round_trip),
        ("media-laws", media_laws),
        ("search-oracle", search_oracle_check),
        ("performance", performance),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
