//! Bug-report CSV ingestion and categorical encoding.
//!
//! Severity and priority use fixed ordinal scales (blocker = 1 through
//! enhancement = 7, P1 through P5). Component, operating system and
//! assignee codes are learned in first-appearance order, so a single pass
//! over the input is enough and identical input always yields identical
//! codes.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Label substituted for blank or `--` attribute cells.
pub const UNSPECIFIED: &str = "Unspecified";

const SEVERITY_LABELS: [&str; 7] = [
    "Blocker",
    "Critical",
    "Major",
    "Normal",
    "Minor",
    "Trivial",
    "Enhancement",
];

const PRIORITY_LABELS: [&str; 5] = ["P1", "P2", "P3", "P4", "P5"];

/// The five bug attributes. The derived ordering is the canonical item order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attribute {
    Severity,
    Priority,
    Component,
    OperatingSystem,
    Assignee,
}

impl Attribute {
    pub const ALL: [Attribute; 5] = [
        Attribute::Severity,
        Attribute::Priority,
        Attribute::Component,
        Attribute::OperatingSystem,
        Attribute::Assignee,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Attribute::Severity => "severity",
            Attribute::Priority => "priority",
            Attribute::Component => "component",
            Attribute::OperatingSystem => "operating_system",
            Attribute::Assignee => "assignee",
        }
    }

    /// Position in [`Attribute::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// Header names for each logical field of a bug export.
///
/// The defaults are Bugzilla's field names as they appear in its CSV export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColumnMap {
    pub bug_id: String,
    pub severity: String,
    pub priority: String,
    pub component: String,
    pub operating_system: String,
    pub assignee: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            bug_id: "bug_id".into(),
            severity: "bug_severity".into(),
            priority: "priority".into(),
            component: "component".into(),
            operating_system: "op_sys".into(),
            assignee: "assigned_to".into(),
        }
    }
}

impl ColumnMap {
    fn headers(&self) -> [&str; 6] {
        [
            &self.bug_id,
            &self.severity,
            &self.priority,
            &self.component,
            &self.operating_system,
            &self.assignee,
        ]
    }
}

/// One bug report as read from the export, before encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawBugRow {
    pub bug_id: String,
    pub severity: String,
    pub priority: String,
    pub component: String,
    pub operating_system: String,
    pub assignee: String,
}

impl RawBugRow {
    pub fn label(&self, attribute: Attribute) -> &str {
        match attribute {
            Attribute::Severity => &self.severity,
            Attribute::Priority => &self.priority,
            Attribute::Component => &self.component,
            Attribute::OperatingSystem => &self.operating_system,
            Attribute::Assignee => &self.assignee,
        }
    }
}

fn attribute_cell(cell: &str) -> String {
    let cell = cell.trim();
    if cell.is_empty() || cell == "--" {
        UNSPECIFIED.to_string()
    } else {
        cell.to_string()
    }
}

/// Reads a CSV export with a header row into raw rows, in file order.
pub fn parse_csv<R: Read>(source: R, column_map: &ColumnMap) -> Result<Vec<RawBugRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(source);
    let header = reader.headers()?.clone();

    let mut columns = [0usize; 6];
    for (slot, name) in columns.iter_mut().zip(column_map.headers()) {
        *slot = header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Schema {
                column: name.to_string(),
            })?;
    }

    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Row {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let cell = |i: usize| record.get(columns[i]).unwrap_or("");

        let bug_id = cell(0).trim().to_string();
        if bug_id.is_empty() {
            return Err(Error::Row {
                line,
                message: "empty bug id".into(),
            });
        }
        if !seen.insert(bug_id.clone()) {
            return Err(Error::DuplicateId { id: bug_id });
        }
        rows.push(RawBugRow {
            bug_id,
            severity: attribute_cell(cell(1)),
            priority: attribute_cell(cell(2)),
            component: attribute_cell(cell(3)),
            operating_system: attribute_cell(cell(4)),
            assignee: attribute_cell(cell(5)),
        });
    }
    Ok(rows)
}

/// Opens `path` and parses it with [`parse_csv`].
pub fn read_csv_file(path: &Path, column_map: &ColumnMap) -> Result<Vec<RawBugRow>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_csv(BufReader::new(file), column_map)
}

fn normalize(label: &str) -> String {
    label.trim().to_lowercase()
}

/// Bijective label/code mapping for one attribute. Codes run 1..=len.
///
/// Lookup is case-insensitive with surrounding whitespace ignored; the
/// stored label keeps the casing it was first seen with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    attribute: Attribute,
    labels: Vec<String>,
    index: HashMap<String, u32>,
}

impl Codebook {
    fn with_labels(attribute: Attribute, labels: &[&str]) -> Self {
        let mut book = Codebook::learned(attribute);
        for label in labels {
            book.intern(label);
        }
        book
    }

    pub fn severity() -> Self {
        Codebook::with_labels(Attribute::Severity, &SEVERITY_LABELS)
    }

    pub fn priority() -> Self {
        Codebook::with_labels(Attribute::Priority, &PRIORITY_LABELS)
    }

    /// An empty codebook that assigns codes on first sight.
    pub fn learned(attribute: Attribute) -> Self {
        Codebook {
            attribute,
            labels: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn attribute(&self) -> Attribute {
        self.attribute
    }

    pub fn code(&self, label: &str) -> Option<u32> {
        self.index.get(&normalize(label)).copied()
    }

    pub fn label(&self, code: u32) -> Option<&str> {
        let slot = usize::try_from(code).ok()?.checked_sub(1)?;
        self.labels.get(slot).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `(code, label)` pairs in code order.
    pub fn entries(&self) -> impl Iterator<Item = (u32, &str)> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, label)| (i as u32 + 1, label.as_str()))
    }

    /// Returns the code for `label`, assigning the next one if it is new.
    pub fn intern(&mut self, label: &str) -> u32 {
        let key = normalize(label);
        if let Some(&code) = self.index.get(&key) {
            return code;
        }
        self.labels.push(label.trim().to_string());
        let code = self.labels.len() as u32;
        self.index.insert(key, code);
        code
    }

    fn encode_fixed(&self, label: &str) -> Result<u32> {
        self.code(label).ok_or_else(|| Error::UnknownCategory {
            attribute: self.attribute,
            label: label.to_string(),
        })
    }

    pub fn decode(&self, code: u32) -> Result<&str> {
        self.label(code).ok_or(Error::Codebook {
            attribute: self.attribute,
            code,
        })
    }
}

impl Serialize for Codebook {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.labels.len()))?;
        for (code, label) in self.entries() {
            map.serialize_entry(label, &code)?;
        }
        map.end()
    }
}

/// Encodes a severity label on the fixed 1 (blocker) to 7 (enhancement) scale.
pub fn encode_severity(label: &str) -> Result<u32> {
    Codebook::severity().encode_fixed(label)
}

/// Encodes `P1`..`P5` as 1..5.
pub fn encode_priority(label: &str) -> Result<u32> {
    Codebook::priority().encode_fixed(label)
}

/// The five codebooks of one dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Codebooks {
    pub severity: Codebook,
    pub priority: Codebook,
    pub component: Codebook,
    pub operating_system: Codebook,
    pub assignee: Codebook,
}

impl Default for Codebooks {
    fn default() -> Self {
        Codebooks {
            severity: Codebook::severity(),
            priority: Codebook::priority(),
            component: Codebook::learned(Attribute::Component),
            operating_system: Codebook::learned(Attribute::OperatingSystem),
            assignee: Codebook::learned(Attribute::Assignee),
        }
    }
}

impl Codebooks {
    pub fn get(&self, attribute: Attribute) -> &Codebook {
        match attribute {
            Attribute::Severity => &self.severity,
            Attribute::Priority => &self.priority,
            Attribute::Component => &self.component,
            Attribute::OperatingSystem => &self.operating_system,
            Attribute::Assignee => &self.assignee,
        }
    }

    pub fn decode(&self, attribute: Attribute, code: u32) -> Result<&str> {
        self.get(attribute).decode(code)
    }

    /// Maps a record back to its labels.
    pub fn decode_record(&self, record: &BugRecord) -> Result<RawBugRow> {
        let label = |a: Attribute| self.decode(a, record.code(a)).map(str::to_string);
        Ok(RawBugRow {
            bug_id: record.bug_id.clone(),
            severity: label(Attribute::Severity)?,
            priority: label(Attribute::Priority)?,
            component: label(Attribute::Component)?,
            operating_system: label(Attribute::OperatingSystem)?,
            assignee: label(Attribute::Assignee)?,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// One encoded bug report.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BugRecord {
    pub bug_id: String,
    pub severity: u32,
    pub priority: u32,
    pub component: u32,
    pub operating_system: u32,
    pub assignee: u32,
}

impl BugRecord {
    pub fn code(&self, attribute: Attribute) -> u32 {
        match attribute {
            Attribute::Severity => self.severity,
            Attribute::Priority => self.priority,
            Attribute::Component => self.component,
            Attribute::OperatingSystem => self.operating_system,
            Attribute::Assignee => self.assignee,
        }
    }
}

/// Builds the five codebooks and encodes every row, preserving input order.
pub fn build_codebooks_and_encode(rows: &[RawBugRow]) -> Result<(Codebooks, Vec<BugRecord>)> {
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut books = Codebooks::default();
    let records = rows
        .iter()
        .map(|row| {
            Ok(BugRecord {
                bug_id: row.bug_id.clone(),
                severity: books.severity.encode_fixed(&row.severity)?,
                priority: books.priority.encode_fixed(&row.priority)?,
                component: books.component.intern(&row.component),
                operating_system: books.operating_system.intern(&row.operating_system),
                assignee: books.assignee.intern(&row.assignee),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((books, records))
}
