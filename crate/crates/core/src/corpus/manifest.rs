//! Scored-corpus manifests: `path,score[,category]` CSV files.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which score convention a corpus follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dataset {
    /// Integer artist ratings 0..=10; 0 marks a failed or unrated form.
    Lomas,
    /// Shipped physical complexity scores, finite and non-negative.
    Dla3d,
    /// Artist ratings normalised to `[0, 1]`.
    LineDrawing,
    Custom,
}

impl Dataset {
    pub fn as_str(self) -> &'static str {
        match self {
            Dataset::Lomas => "lomas",
            Dataset::Dla3d => "dla3d",
            Dataset::LineDrawing => "linedrawing",
            Dataset::Custom => "custom",
        }
    }

    /// Checks a score against the dataset convention and decides inclusion.
    pub fn validate_score(self, score: f64) -> std::result::Result<bool, String> {
        if !score.is_finite() {
            return Err(format!("score {score} is not finite"));
        }
        match self {
            Dataset::Lomas => {
                if score.fract() != 0.0 || !(0.0..=10.0).contains(&score) {
                    return Err(format!("lomas score must be an integer in 0..=10, got {score}"));
                }
                Ok(score != 0.0)
            }
            Dataset::Dla3d => {
                if score < 0.0 {
                    return Err(format!("dla3d score must be >= 0, got {score}"));
                }
                Ok(true)
            }
            Dataset::LineDrawing => {
                if !(0.0..=1.0).contains(&score) {
                    return Err(format!("linedrawing score must lie in [0, 1], got {score}"));
                }
                Ok(true)
            }
            Dataset::Custom => Ok(true),
        }
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Dataset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lomas" => Ok(Dataset::Lomas),
            "dla3d" | "dla" => Ok(Dataset::Dla3d),
            "linedrawing" | "line-drawing" | "linedrawings" => Ok(Dataset::LineDrawing),
            "custom" => Ok(Dataset::Custom),
            other => Err(Error::Parse(format!("unknown dataset tag '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub image_path: PathBuf,
    pub score: f64,
    pub dataset: Dataset,
    pub category: Option<String>,
    pub included: bool,
}

#[derive(Debug, Deserialize)]
struct Row {
    path: String,
    score: String,
    #[serde(default)]
    category: Option<String>,
}

/// Reads a manifest. Relative image paths resolve against the manifest's directory.
pub fn load_manifest(path: impl AsRef<Path>, dataset: Dataset) -> Result<Vec<CorpusRecord>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_manifest(&text, base, dataset).map_err(|e| match e {
        Error::Manifest { row, message, .. } => Error::Manifest {
            path: path.to_path_buf(),
            row,
            message,
        },
        other => other,
    })
}

/// Parses manifest text; `row` in errors is the 1-based line number.
pub fn parse_manifest(text: &str, base: &Path, dataset: Dataset) -> Result<Vec<CorpusRecord>> {
    let err = |row: usize, message: String| Error::Manifest {
        path: PathBuf::from("<manifest>"),
        row,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| err(1, e.to_string()))?.clone();
    for required in ["path", "score"] {
        if !headers.iter().any(|h| h == required) {
            return Err(err(1, format!("missing '{required}' column")));
        }
    }

    let mut records = Vec::new();
    for result in reader.records() {
        let raw = result.map_err(|e| {
            let row = e.position().map_or(0, |p| p.line() as usize);
            err(row, e.to_string())
        })?;
        let row_no = raw.position().map_or(0, |p| p.line() as usize);
        let row: Row = raw
            .deserialize(Some(&headers))
            .map_err(|e| err(row_no, e.to_string()))?;
        let score: f64 = row
            .score
            .parse()
            .map_err(|_| err(row_no, format!("unparseable score '{}'", row.score)))?;
        let included = dataset.validate_score(score).map_err(|m| err(row_no, m))?;
        if row.path.is_empty() {
            return Err(err(row_no, "empty path".into()));
        }
        let image_path = PathBuf::from(&row.path);
        let image_path = if image_path.is_absolute() {
            image_path
        } else {
            base.join(image_path)
        };
        records.push(CorpusRecord {
            image_path,
            score,
            dataset,
            category: row.category.filter(|c| !c.is_empty()),
            included,
        });
    }
    Ok(records)
}

/// Writes records back out in manifest form with paths as given.
pub fn write_manifest(records: &[CorpusRecord], mut out: impl std::io::Write) -> Result<()> {
    let has_category = records.iter().any(|r| r.category.is_some());
    let io = |e: std::io::Error| Error::io("<manifest>", e);
    if has_category {
        writeln!(out, "path,score,category").map_err(io)?;
    } else {
        writeln!(out, "path,score").map_err(io)?;
    }
    for r in records {
        let path = r.image_path.to_string_lossy();
        if has_category {
            writeln!(out, "{},{},{}", csv_field(&path), r.score, csv_field(r.category.as_deref().unwrap_or(""))).map_err(io)?;
        } else {
            writeln!(out, "{},{}", csv_field(&path), r.score).map_err(io)?;
        }
    }
    Ok(())
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
