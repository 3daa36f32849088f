//! Pipeline configuration: a TOML file plus command-line overrides.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, FieldError, Result};
use crate::ingest::ColumnMap;

pub const DEFAULT_CLUSTERS: usize = 5;
pub const DEFAULT_MIN_SUPPORT_COUNT: u32 = 3;
pub const DEFAULT_MIN_CONFIDENCE: f64 = 0.10;
pub const DEFAULT_TOP_ASSIGNEES: usize = 5;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_MAX_ITERATIONS: usize = 100;
pub const DEFAULT_OUTPUT_DIR: &str = "output";

/// A validated configuration. `output_dir` is not archived with the report
/// so that the same run written to two places produces identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub input_path: PathBuf,
    pub column_map: ColumnMap,
    pub k: usize,
    pub min_support_count: u32,
    pub min_confidence: f64,
    pub top_n: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Worker threads for per-cluster mining; defaults to `k`.
    pub parallelism: usize,
    #[serde(skip)]
    pub output_dir: PathBuf,
}

impl PipelineConfig {
    /// Default parameters for `input_path`.
    pub fn with_defaults(input_path: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            input_path: input_path.into(),
            column_map: ColumnMap::default(),
            k: DEFAULT_CLUSTERS,
            min_support_count: DEFAULT_MIN_SUPPORT_COUNT,
            min_confidence: DEFAULT_MIN_CONFIDENCE,
            top_n: DEFAULT_TOP_ASSIGNEES,
            seed: DEFAULT_SEED,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            parallelism: DEFAULT_CLUSTERS,
            output_dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Optional settings, as read from the config file or from flags.
///
/// Counts are signed so that a negative value reaches validation and is
/// reported against its field name.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub input_path: Option<PathBuf>,
    pub column_map: Option<ColumnMap>,
    pub k: Option<i64>,
    pub min_support_count: Option<i64>,
    pub min_confidence: Option<f64>,
    pub top_n: Option<i64>,
    pub seed: Option<u64>,
    pub max_iterations: Option<i64>,
    pub parallelism: Option<i64>,
    pub output_dir: Option<PathBuf>,
}

impl ConfigOverrides {
    /// Fields set in `over` replace those in `self`.
    pub fn merged(self, over: ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            input_path: over.input_path.or(self.input_path),
            column_map: over.column_map.or(self.column_map),
            k: over.k.or(self.k),
            min_support_count: over.min_support_count.or(self.min_support_count),
            min_confidence: over.min_confidence.or(self.min_confidence),
            top_n: over.top_n.or(self.top_n),
            seed: over.seed.or(self.seed),
            max_iterations: over.max_iterations.or(self.max_iterations),
            parallelism: over.parallelism.or(self.parallelism),
            output_dir: over.output_dir.or(self.output_dir),
        }
    }
}

fn positive<T: TryFrom<i64>>(
    field: &str,
    value: Option<i64>,
    default: T,
    errors: &mut Vec<FieldError>,
) -> T {
    match value {
        None => default,
        Some(v) if v >= 1 => match T::try_from(v) {
            Ok(v) => v,
            Err(_) => {
                errors.push(FieldError::new(field, format!("{v} is out of range")));
                default
            }
        },
        Some(v) => {
            errors.push(FieldError::new(
                field,
                format!("must be a positive integer, got {v}"),
            ));
            default
        }
    }
}

/// Parses TOML config text, applies `flags` on top, fills defaults and
/// checks every field. All violations are reported together.
pub fn validate_config(raw: &str, flags: ConfigOverrides) -> Result<PipelineConfig> {
    let file: ConfigOverrides = toml::from_str(raw)
        .map_err(|e| Error::Validation(vec![FieldError::new("config", e.to_string())]))?;
    let merged = file.merged(flags);

    let mut errors = Vec::new();
    let k = positive("k", merged.k, DEFAULT_CLUSTERS, &mut errors);
    let min_support_count = positive(
        "min_support_count",
        merged.min_support_count,
        DEFAULT_MIN_SUPPORT_COUNT,
        &mut errors,
    );
    let top_n = positive("top_n", merged.top_n, DEFAULT_TOP_ASSIGNEES, &mut errors);
    let max_iterations = positive(
        "max_iterations",
        merged.max_iterations,
        DEFAULT_MAX_ITERATIONS,
        &mut errors,
    );
    let parallelism = positive("parallelism", merged.parallelism, k, &mut errors);

    let min_confidence = merged.min_confidence.unwrap_or(DEFAULT_MIN_CONFIDENCE);
    if !(min_confidence > 0.0 && min_confidence <= 1.0) {
        errors.push(FieldError::new(
            "min_confidence",
            format!("must lie in (0, 1], got {min_confidence}"),
        ));
    }

    let input_path = merged.input_path.unwrap_or_default();
    if input_path.as_os_str().is_empty() {
        errors.push(FieldError::new("input_path", "an input CSV is required"));
    }

    let column_map = merged.column_map.unwrap_or_default();
    for (field, header) in [
        ("column_map.bug_id", &column_map.bug_id),
        ("column_map.severity", &column_map.severity),
        ("column_map.priority", &column_map.priority),
        ("column_map.component", &column_map.component),
        ("column_map.operating_system", &column_map.operating_system),
        ("column_map.assignee", &column_map.assignee),
    ] {
        if header.trim().is_empty() {
            errors.push(FieldError::new(field, "header name must not be empty"));
        }
    }

    if !errors.is_empty() {
        return Err(Error::Validation(errors));
    }
    Ok(PipelineConfig {
        input_path,
        column_map,
        k,
        min_support_count,
        min_confidence,
        top_n,
        seed: merged.seed.unwrap_or(DEFAULT_SEED),
        max_iterations,
        parallelism,
        output_dir: merged
            .output_dir
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
    })
}
