//! Validation against the SLN schema rules.
//!
//! The engine is a fixed rule set rather than a general XSD processor. It
//! streams the document once and reports every violation it meets, each
//! tagged with a catalogue rule id and an element path such as
//! `/sln/website[2]/contacts/contact`.

use std::fmt::Write as _;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::model::Notebook;
use crate::xml::{serialize_to_vec, XmlError};

mod engine;
mod rules;

pub use rules::{explain, find_rule, rule_catalogue, Rule, RuleOrigin, SchemaConstruct, UnknownRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub rule_id: String,
    pub path: String,
    pub severity: Severity,
    pub message: String,
    pub line: u64,
    pub column: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
    pub valid: bool,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    valid: bool,
    error_count: usize,
    warning_count: usize,
    findings: &'a [Finding],
}

impl ValidationReport {
    fn new(findings: Vec<Finding>) -> Self {
        let valid = findings.iter().all(|f| f.severity != Severity::Error);
        ValidationReport { findings, valid }
    }

    pub fn error_count(&self) -> usize {
        self.findings.iter().filter(|f| f.severity == Severity::Error).count()
    }

    pub fn warning_count(&self) -> usize {
        self.findings.len() - self.error_count()
    }

    /// Ids of the rules that fired, in report order, without repeats.
    pub fn rule_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = Vec::new();
        for f in &self.findings {
            if !ids.contains(&f.rule_id.as_str()) {
                ids.push(&f.rule_id);
            }
        }
        ids
    }

    /// One `severity rule_id path message` line per finding, then a summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.findings {
            let _ = writeln!(out, "{} {} {} {}", f.severity.as_str(), f.rule_id, f.path, f.message);
        }
        if self.valid {
            let _ = writeln!(out, "valid ({} warnings)", self.warning_count());
        } else {
            let _ = writeln!(out, "invalid ({} errors, {} warnings)", self.error_count(), self.warning_count());
        }
        out
    }

    pub fn to_json(&self) -> String {
        let report = JsonReport {
            valid: self.valid,
            error_count: self.error_count(),
            warning_count: self.warning_count(),
            findings: &self.findings,
        };
        serde_json::to_string_pretty(&report).expect("report serializes")
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidateOptions {
    /// Report unknown elements, attributes and stray text as warnings.
    pub lenient: bool,
}

/// Reusable, stateless validator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Validator {
    options: ValidateOptions,
}

impl Validator {
    pub fn new(options: ValidateOptions) -> Self {
        Validator { options }
    }

    /// Fails only when the input is not well-formed XML or cannot be read.
    pub fn validate<R: Read>(&self, source: R) -> Result<ValidationReport, XmlError> {
        engine::run(source, self.options.lenient).map(ValidationReport::new)
    }

    pub fn validate_notebook(&self, nb: &Notebook) -> ValidationReport {
        let bytes = serialize_to_vec(nb);
        self.validate(bytes.as_slice())
            .expect("canonical serialization is well-formed")
    }
}

pub fn validate<R: Read>(source: R) -> Result<ValidationReport, XmlError> {
    Validator::default().validate(source)
}

/// Validates the canonical serialization of `nb`.
pub fn validate_notebook(nb: &Notebook) -> ValidationReport {
    Validator::default().validate_notebook(nb)
}
