//! Dataset ingestion: csv, tsv and jsonl files with a selectable text column.
//!
//! Rows are read in file order. A row limit is applied to the raw rows first
//! and deduplication (on normalized text) second, so `limit = 1000` means
//! "the first 1,000 rows of the file".

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::classifier::{GoldLabels, Label, Sample};
use crate::error::{Error, Result};
use crate::textproc::normalize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Tsv,
    Jsonl,
}

impl Format {
    /// Guess from the file extension (`.csv`, `.tsv`, `.jsonl`/`.json`).
    pub fn from_path(path: &Path) -> Option<Format> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(Format::Csv),
            "tsv" | "tab" => Some(Format::Tsv),
            "jsonl" | "ndjson" | "json" => Some(Format::Jsonl),
            _ => None,
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "tsv" => Ok(Format::Tsv),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(format!("unknown format `{other}` (csv, tsv, jsonl)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Tsv => "tsv",
            Format::Jsonl => "jsonl",
        })
    }
}

/// Where a dataset lives and which fields to take from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub path: PathBuf,
    pub format: Format,
    pub text_field: String,
    pub id_field: Option<String>,
    pub label_field: Option<String>,
    pub limit: Option<usize>,
    pub dedup: bool,
}

impl DatasetSpec {
    /// Spec with the format guessed from the extension (csv if unknown),
    /// dedup on and no limit.
    pub fn new(path: impl Into<PathBuf>, text_field: impl Into<String>) -> Self {
        let path = path.into();
        DatasetSpec {
            format: Format::from_path(&path).unwrap_or(Format::Csv),
            path,
            text_field: text_field.into(),
            id_field: None,
            label_field: None,
            limit: None,
            dedup: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.text_field.trim().is_empty() {
            return Err(Error::Config("text field must not be empty".into()));
        }
        if self.limit == Some(0) {
            return Err(Error::Config("limit must be at least 1".into()));
        }
        Ok(())
    }
}

/// Samples in file order, plus gold labels when a label field was given.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    /// Aligned with `samples`.
    pub labels: Option<Vec<Label>>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn gold(&self) -> Option<GoldLabels> {
        let labels = self.labels.as_ref()?;
        Some(
            self.samples
                .iter()
                .zip(labels)
                .map(|(s, &l)| (s.id.clone(), l))
                .collect(),
        )
    }

    /// `(sample, label)` pairs; `None` for unlabeled data.
    pub fn labeled(&self) -> Option<Vec<(Sample, Label)>> {
        let labels = self.labels.as_ref()?;
        Some(self.samples.iter().cloned().zip(labels.iter().copied()).collect())
    }

    /// Drop rows whose normalized text was already seen. Keeps the first.
    pub fn dedup(self) -> Dataset {
        let mut seen = HashSet::new();
        let keep: Vec<bool> = self
            .samples
            .iter()
            .map(|s| seen.insert(normalize(&s.text).joined()))
            .collect();
        let samples = self
            .samples
            .into_iter()
            .zip(&keep)
            .filter_map(|(s, &k)| k.then_some(s))
            .collect();
        let labels = self.labels.map(|labels| {
            labels
                .into_iter()
                .zip(&keep)
                .filter_map(|(l, &k)| k.then_some(l))
                .collect()
        });
        Dataset { samples, labels }
    }
}

/// Drop samples whose normalized text repeats an earlier one.
pub fn dedup(samples: Vec<Sample>) -> Vec<Sample> {
    Dataset {
        samples,
        labels: None,
    }
    .dedup()
    .samples
}

struct Row {
    line: u64,
    text: String,
    id: Option<String>,
    label: Option<String>,
}

pub fn read_dataset(spec: &DatasetSpec) -> Result<Dataset> {
    spec.validate()?;
    let limit = spec.limit.unwrap_or(usize::MAX);
    let rows = match spec.format {
        Format::Csv => read_delimited(spec, b',', limit)?,
        Format::Tsv => read_delimited(spec, b'\t', limit)?,
        Format::Jsonl => read_jsonl(spec, limit)?,
    };

    let mut seen_ids = HashSet::with_capacity(rows.len());
    let mut samples = Vec::with_capacity(rows.len());
    let mut labels = spec.label_field.as_ref().map(|_| Vec::with_capacity(rows.len()));
    for (index, row) in rows.into_iter().enumerate() {
        let bad = |message: String| Error::Dataset {
            path: spec.path.clone(),
            line: row.line,
            message,
        };
        let id = row.id.unwrap_or_else(|| index.to_string());
        if !seen_ids.insert(id.clone()) {
            return Err(bad(format!("duplicate id `{id}`")));
        }
        if let (Some(labels), Some(raw)) = (labels.as_mut(), row.label.as_deref()) {
            labels.push(raw.trim().to_ascii_lowercase().parse::<Label>().map_err(bad)?);
        }
        samples.push(Sample { id, text: row.text });
    }

    let mut dataset = Dataset { samples, labels };
    if spec.dedup {
        dataset = dataset.dedup();
    }
    if dataset.is_empty() {
        return Err(Error::EmptyData(format!(
            "{}: no samples read",
            spec.path.display()
        )));
    }
    Ok(dataset)
}

fn read_delimited(spec: &DatasetSpec, delimiter: u8, limit: usize) -> Result<Vec<Row>> {
    let file = File::open(&spec.path).map_err(|e| Error::io(&spec.path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .from_reader(BufReader::new(file));
    let csv_err = |e: csv::Error| {
        let line = e.position().map_or(0, |p| p.line());
        Error::Dataset {
            path: spec.path.clone(),
            line,
            message: e.to_string(),
        }
    };
    let headers = reader.headers().map_err(csv_err)?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let missing = |name: &str| Error::MissingField {
        path: spec.path.clone(),
        field: name.to_owned(),
    };
    let text_col = column(&spec.text_field).ok_or_else(|| missing(&spec.text_field))?;
    let id_col = match &spec.id_field {
        Some(f) => Some(column(f).ok_or_else(|| missing(f))?),
        None => None,
    };
    let label_col = match &spec.label_field {
        Some(f) => Some(column(f).ok_or_else(|| missing(f))?),
        None => None,
    };

    let mut rows = Vec::new();
    let mut record = csv::StringRecord::new();
    while rows.len() < limit && reader.read_record(&mut record).map_err(csv_err)? {
        let line = record.position().map_or(0, |p| p.line());
        let field = |col: usize| record.get(col).unwrap_or_default().to_owned();
        rows.push(Row {
            line,
            text: field(text_col),
            id: id_col.map(field),
            label: label_col.map(field),
        });
    }
    Ok(rows)
}

fn read_jsonl(spec: &DatasetSpec, limit: usize) -> Result<Vec<Row>> {
    let file = File::open(&spec.path).map_err(|e| Error::io(&spec.path, e))?;
    let mut rows = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        if rows.len() >= limit {
            break;
        }
        let line_no = n as u64 + 1;
        let bad = |message: String| Error::Dataset {
            path: spec.path.clone(),
            line: line_no,
            message,
        };
        let line = line.map_err(|e| bad(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let object: IndexMap<String, serde_json::Value> =
            serde_json::from_str(&line).map_err(|e| bad(format!("invalid JSON object: {e}")))?;
        let first = rows.is_empty();
        let lookup = |key: &str, required: bool| -> Result<Option<String>> {
            match object.get(key) {
                Some(serde_json::Value::String(s)) => Ok(Some(s.clone())),
                Some(v @ (serde_json::Value::Number(_) | serde_json::Value::Bool(_))) => {
                    Ok(Some(v.to_string()))
                }
                Some(serde_json::Value::Null) | None if !required => Ok(None),
                None if first => Err(Error::MissingField {
                    path: spec.path.clone(),
                    field: key.to_owned(),
                }),
                None => Err(bad(format!("missing key `{key}`"))),
                Some(other) => Err(bad(format!("key `{key}` has non-scalar value {other}"))),
            }
        };
        let text = lookup(&spec.text_field, true)?.unwrap_or_default();
        let id = match &spec.id_field {
            Some(f) => Some(lookup(f, true)?.unwrap_or_default()),
            None => None,
        };
        let label = match &spec.label_field {
            Some(f) => Some(lookup(f, true)?.unwrap_or_default()),
            None => None,
        };
        rows.push(Row {
            line: line_no,
            text,
            id,
            label,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelHistogram {
    pub biased: u64,
    pub unbiased: u64,
}

impl LabelHistogram {
    pub fn from_labels<'a>(labels: impl IntoIterator<Item = &'a Label>) -> Self {
        let mut h = LabelHistogram::default();
        for label in labels {
            match label {
                Label::Biased => h.biased += 1,
                Label::Unbiased => h.unbiased += 1,
            }
        }
        h
    }

    pub fn total(&self) -> u64 {
        self.biased + self.unbiased
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub count: usize,
    pub unique_count: usize,
    pub labels: Option<LabelHistogram>,
}

/// Sample count, distinct normalized texts, and the label histogram when
/// labels are present.
pub fn dataset_stats(samples: &[Sample], labels: Option<&[Label]>) -> DatasetStats {
    let unique: HashSet<String> = samples.iter().map(|s| normalize(&s.text).joined()).collect();
    DatasetStats {
        count: samples.len(),
        unique_count: unique.len(),
        labels: labels.map(LabelHistogram::from_labels),
    }
}
