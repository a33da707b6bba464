//! Frequency tables on disk.
//!
//! ```text
//! # elements=52063
//! label,count
//! 2 euro,41432
//! 1 euro,7041
//! ```
//!
//! Lines starting with `#` are comments. Two are read as metadata:
//! `# elements=<integer>` gives `|M|`, and `# summary=exclude` keeps the
//! dataset out of corpus summaries. A `label,count` header is required.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fitting::{preprocess_labeled, EmpiricalDistribution};
use crate::studies::StudyDataset;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub labels: Vec<String>,
    pub counts: Vec<f64>,
    pub elements: Option<u64>,
    pub in_summary: bool,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

impl Dataset {
    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let mut elements = None;
        let mut in_summary = true;
        for (i, line) in text.lines().enumerate() {
            let Some(meta) = line.trim_start().strip_prefix('#') else {
                continue;
            };
            let Some((key, value)) = meta.split_once('=') else {
                continue;
            };
            match key.trim() {
                "elements" => {
                    let n = value
                        .trim()
                        .parse::<u64>()
                        .ok()
                        .filter(|&n| n > 0)
                        .ok_or_else(|| parse_err(i + 1, format!("invalid element count '{}'", value.trim())))?;
                    elements = Some(n);
                }
                "summary" => match value.trim() {
                    "exclude" => in_summary = false,
                    "include" => in_summary = true,
                    other => return Err(parse_err(i + 1, format!("unknown summary flag '{other}'"))),
                },
                _ => {}
            }
        }

        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut labels = Vec::new();
        let mut counts = Vec::new();
        let mut header_seen = false;
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                parse_err(line, e.to_string())
            })?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            if record.iter().all(str::is_empty) {
                continue;
            }
            if !header_seen {
                let cols: Vec<String> = record.iter().map(str::to_ascii_lowercase).collect();
                if cols != ["label", "count"] {
                    return Err(parse_err(line, "expected header 'label,count'"));
                }
                header_seen = true;
                continue;
            }
            if record.len() != 2 {
                return Err(parse_err(line, format!("expected 2 fields, found {}", record.len())));
            }
            let count: f64 = record[1]
                .parse()
                .map_err(|_| parse_err(line, format!("count '{}' is not a number", &record[1])))?;
            if !count.is_finite() {
                return Err(parse_err(line, format!("count {count} must be finite")));
            }
            labels.push(record[0].to_string());
            counts.push(count);
        }
        if !header_seen {
            return Err(parse_err(1, "missing header 'label,count'"));
        }
        if counts.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(Self {
            name: name.to_string(),
            labels,
            counts,
            elements,
            in_summary,
        })
    }

    /// Reads a file; the dataset is named after the file stem.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::parse(&name, &text)
    }

    pub fn distribution(&self) -> Result<EmpiricalDistribution> {
        preprocess_labeled(&self.counts, self.labels.clone(), self.elements)
    }

    pub fn into_study(self) -> Result<StudyDataset> {
        Ok(StudyDataset {
            data: self.distribution()?,
            id: self.name,
            in_summary: self.in_summary,
        })
    }
}

/// All `*.csv` files in `dir`, sorted by file name.
pub fn dataset_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    paths.sort();
    Ok(paths)
}
