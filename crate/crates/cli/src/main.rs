//! `sln`: batch command-line access to Solar Lab Notebook files.
//!
//! Exit codes: 0 success or valid, 1 document invalid (or, for `diff`,
//! notebooks differ), 2 I/O or parse failure, 3 usage error.

use std::fs::{File, OpenOptions};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use sln_core::media::{crop, decode_raster, encode_raster, make_thumbnail, scale, CropRect, ScaleFactor};
use sln_core::ops::{self, FixtureSpec, MergePolicy};
use sln_core::schema::{self, ValidateOptions, Validator};
use sln_core::search::SearchIndex;
use sln_core::xml::{self, parse_notebook, serialize_notebook, XmlError};
use sln_core::{new_notebook, Execution, Notebook};

const EXIT_INVALID: u8 = 1;
const EXIT_FAILURE: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "sln", version, about = "Validate, inspect and transform Solar Lab Notebook (.sln) files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Prefer {
    First,
    Second,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Check a notebook against the schema rules
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Report unknown elements, attributes and stray text as warnings
        #[arg(long)]
        lenient: bool,
    },
    /// Create an empty notebook
    New {
        file: PathBuf,
        /// Replace the file if it exists
        #[arg(long)]
        force: bool,
    },
    /// Count websites, images and payload bytes in one streaming pass
    Stats {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// List websites whose name, location or purpose contains TEXT
    Query {
        file: PathBuf,
        text: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Combine two notebooks
    Merge {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Which side wins when entries share a name and location
        #[arg(long, value_enum, default_value = "both")]
        prefer: Prefer,
    },
    /// Write embedded images or datasets out as files
    Extract(ExtractArgs),
    /// Crop and scale a PNG, or make a thumbnail when no scale is given
    Thumb {
        image: PathBuf,
        /// One of 1:1, 1:2, 1:4, 1:8
        #[arg(long)]
        scale: Option<ScaleFactor>,
        /// Rectangle x,y,w,h applied before scaling
        #[arg(long)]
        crop: Option<CropRect>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Show key-based differences between two notebooks
    Diff { a: PathBuf, b: PathBuf },
    /// Write a synthetic notebook of roughly the requested size
    Generate {
        file: PathBuf,
        #[arg(long)]
        target_bytes: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// List the validation rules
    Rules {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Describe one validation rule
    Explain { rule: String },
}

#[derive(Args)]
#[group(skip)]
#[command(group(ArgGroup::new("kind").required(true).args(["images", "datasets"])))]
struct ExtractArgs {
    file: PathBuf,
    #[arg(long)]
    images: bool,
    #[arg(long)]
    datasets: bool,
    #[arg(short, long)]
    output: PathBuf,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Failure {
            code: EXIT_FAILURE,
            message: format!("{}: {e}", path.display()),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("sln: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(|f| BufReader::with_capacity(1 << 16, f))
        .map_err(|e| Failure::io(path, e))
}

fn load(path: &Path) -> Result<Notebook, Failure> {
    parse_notebook(open(path)?).map_err(|e| xml_failure(path, e))
}

fn xml_failure(path: &Path, e: XmlError) -> Failure {
    Failure::io(path, e)
}

fn save(nb: &Notebook, path: &Path) -> Result<(), Failure> {
    let file = File::create(path).map_err(|e| Failure::io(path, e))?;
    serialize_notebook(nb, file).map_err(|e| Failure::io(path, e))
}

fn print(text: &str) -> Outcome {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::io(Path::new("<stdout>"), e))?;
    Ok(0)
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Validate { file, format, lenient } => {
            let report = Validator::new(ValidateOptions { lenient })
                .validate(open(&file)?)
                .map_err(|e| xml_failure(&file, e))?;
            print(&match format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json() + "\n",
            })?;
            Ok(if report.valid { 0 } else { EXIT_INVALID })
        }
        Command::New { file, force } => {
            let mut options = OpenOptions::new();
            options.write(true);
            if force {
                options.create(true).truncate(true);
            } else {
                options.create_new(true);
            }
            let handle = options.open(&file).map_err(|e| Failure::io(&file, e))?;
            serialize_notebook(&new_notebook(), handle).map_err(|e| Failure::io(&file, e))?;
            Ok(0)
        }
        Command::Stats { file, format } => {
            let stats = xml::stream_stats(open(&file)?).map_err(|e| xml_failure(&file, e))?;
            print(&match format {
                Format::Text => format!(
                    "website_count={}\ndataset_bytes={}\nimage_count={}\ntotal_media_bytes={}\n",
                    stats.website_count, stats.dataset_bytes, stats.image_count, stats.total_media_bytes
                ),
                Format::Json => serde_json::to_string_pretty(&stats).expect("stats serialize") + "\n",
            })
        }
        Command::Query { file, text, format } => {
            let nb = load(&file)?;
            let index = SearchIndex::build(&nb);
            match format {
                Format::Text => {
                    let mut out = String::new();
                    for id in index.entry_ids(&text) {
                        let w = &nb.websites[id];
                        out.push_str(&format!("{}\t{}\n", w.name, w.location));
                    }
                    print(&out)
                }
                Format::Json => {
                    let hits: Vec<_> = index
                        .query(&text)
                        .into_iter()
                        .map(|h| {
                            serde_json::json!({
                                "website": h.entry + 1,
                                "name": nb.websites[h.entry].name,
                                "field": h.field,
                                "offset": h.offset,
                            })
                        })
                        .collect();
                    print(&(serde_json::to_string_pretty(&hits).expect("hits serialize") + "\n"))
                }
            }
        }
        Command::Merge { a, b, output, prefer } => {
            let (na, nb) = (load(&a)?, load(&b)?);
            let policy = match prefer {
                Prefer::First => MergePolicy::PreferFirst,
                Prefer::Second => MergePolicy::PreferSecond,
                Prefer::Both => MergePolicy::KeepBoth,
            };
            let merged = ops::merge(&na, &nb, policy);
            save(&merged, &output)?;
            eprintln!("sln: wrote {} websites to {}", merged.websites.len(), output.display());
            Ok(0)
        }
        Command::Extract(args) => {
            let nb = load(&args.file)?;
            let manifest = if args.images {
                ops::extract_media(&nb, &args.output)
            } else {
                ops::extract_datasets(&nb, &args.output)
            }
            .map_err(|e| Failure {
                code: EXIT_FAILURE,
                message: e.to_string(),
            })?;
            print(&(manifest.to_json() + "\n"))
        }
        Command::Thumb { image, scale: factor, crop: rect, output } => {
            let bytes = std::fs::read(&image).map_err(|e| Failure::io(&image, e))?;
            let mut raster = decode_raster(&bytes).map_err(|e| Failure::io(&image, e))?;
            if let Some(rect) = rect {
                raster = crop(&raster, rect).map_err(|e| Failure::usage(e.to_string()))?;
            }
            let result = match factor {
                Some(f) => scale(&raster, f),
                None => make_thumbnail(&raster),
            };
            let mut out = BufWriter::new(File::create(&output).map_err(|e| Failure::io(&output, e))?);
            out.write_all(&encode_raster(&result))
                .and_then(|_| out.flush())
                .map_err(|e| Failure::io(&output, e))?;
            eprintln!("sln: wrote {}x{} PNG to {}", result.width(), result.height(), output.display());
            Ok(0)
        }
        Command::Diff { a, b } => {
            let (na, nb) = (load(&a)?, load(&b)?);
            let changes = ops::diff(&na, &nb);
            let text: String = changes.iter().map(|c| format!("{c}\n")).collect();
            print(&text)?;
            Ok(if changes.is_empty() { 0 } else { EXIT_INVALID })
        }
        Command::Generate { file, target_bytes, seed } => {
            let spec = FixtureSpec::for_target_bytes(target_bytes, seed);
            let manifest =
                ops::generate_fixture_file(&spec, &file, Execution::default()).map_err(|e| Failure::io(&file, e))?;
            print(&(serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n"))
        }
        Command::Rules { format } => match format {
            Format::Text => {
                let text: String = schema::rule_catalogue()
                    .iter()
                    .map(|r| format!("{}\t{:?}\t{}\n", r.id, r.schema_construct, r.description))
                    .collect();
                print(&text)
            }
            Format::Json => print(
                &(serde_json::to_string_pretty(schema::rule_catalogue()).expect("catalogue serializes") + "\n"),
            ),
        },
        Command::Explain { rule } => {
            let text = schema::explain(&rule).map_err(|e| Failure::usage(e.to_string()))?;
            print(&text)
        }
    }
}
