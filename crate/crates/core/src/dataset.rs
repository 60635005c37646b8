//! Positive univariate samples and their text formats.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest sample that identifies three parameters.
pub const MIN_OBSERVATIONS: usize = 3;

const CARBON_FIBERS: &str = include_str!("../../../data/carbon_fibers.csv");
const WHEATON_RIVER: &str = include_str!("../../../data/wheaton_river.csv");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    values: Vec<f64>,
    label: String,
}

impl Dataset {
    pub fn new(values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Dataset("empty dataset".into()));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::Dataset(format!(
                "value {v} at position {} is not a positive finite number",
                i + 1
            )));
        }
        if values.len() < MIN_OBSERVATIONS {
            return Err(Error::Dataset(format!(
                "{} observations given, at least {MIN_OBSERVATIONS} required",
                values.len()
            )));
        }
        Ok(Dataset {
            values,
            label: label.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataFormat {
    /// One numeric column, optionally preceded by a header line.
    Csv,
    /// Any whitespace-separated numbers.
    Whitespace,
}

impl DataFormat {
    /// `Csv` for `.csv` files, `Whitespace` otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => DataFormat::Csv,
            _ => DataFormat::Whitespace,
        }
    }
}

fn parse_value(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("'{token}' is not a number"),
    })?;
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("{v} is not a positive finite value"),
        });
    }
    Ok(v)
}

/// Parses `text`; `#` starts a comment. Errors carry 1-based line numbers.
pub fn parse_dataset(text: &str, format: DataFormat, label: impl Into<String>) -> Result<Dataset> {
    let mut values = Vec::new();
    let mut seen_content = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let first_content = !seen_content;
        seen_content = true;
        match format {
            DataFormat::Csv => {
                let fields: Vec<&str> = content.split(',').map(str::trim).collect();
                if fields.len() != 1 {
                    return Err(Error::Parse {
                        line,
                        message: format!("expected one column, found {}", fields.len()),
                    });
                }
                let field = fields[0].trim_matches('"');
                match parse_value(field, line) {
                    Ok(v) => values.push(v),
                    Err(_) if first_content && field.parse::<f64>().is_err() => {}
                    Err(e) => return Err(e),
                }
            }
            DataFormat::Whitespace => {
                for token in content.split_whitespace() {
                    values.push(parse_value(token, line)?);
                }
            }
        }
    }
    Dataset::new(values, label)
}

pub fn load_dataset(path: &Path, format: DataFormat) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    let label = path.file_stem().and_then(|s| s.to_str()).unwrap_or("data").to_string();
    parse_dataset(&text, format, label)
}

/// Bundled samples: `carbon_fibers` (n = 50) and `wheaton_river` (n = 72).
pub fn bundled(name: &str) -> Option<Dataset> {
    let text = match name {
        "carbon_fibers" => CARBON_FIBERS,
        "wheaton_river" => WHEATON_RIVER,
        _ => return None,
    };
    Some(parse_dataset(text, DataFormat::Csv, name).expect("bundled data is valid"))
}
