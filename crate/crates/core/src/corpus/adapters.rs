//! Builds manifests from a dataset's own score table.
//!
//! Each published corpus ships images plus a table of scores. The adapter maps
//! a file-name column and a score column onto manifest rows, resolving names
//! against an image directory.

use std::path::{Path, PathBuf};

use super::manifest::{CorpusRecord, Dataset};
use crate::error::{Error, Result};

/// Render selection for the DLA corpus, which ships two views per form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DlaView {
    #[default]
    Perspective,
    Orthographic,
}

impl DlaView {
    fn markers(self) -> &'static [&'static str] {
        match self {
            DlaView::Perspective => &["persp"],
            DlaView::Orthographic => &["ortho", "top"],
        }
    }

    /// Whether a file path belongs to this view (case-insensitive name match).
    pub fn matches(self, path: &Path) -> bool {
        let name = path.to_string_lossy().to_ascii_lowercase();
        self.markers().iter().any(|m| name.contains(m))
    }
}

#[derive(Debug, Clone)]
pub struct ScoreTable {
    pub path_column: String,
    pub score_column: String,
    pub category_column: Option<String>,
    /// Appended to the file-name column value when it carries no extension.
    pub default_extension: Option<String>,
}

impl Default for ScoreTable {
    fn default() -> Self {
        Self {
            path_column: "path".into(),
            score_column: "score".into(),
            category_column: None,
            default_extension: None,
        }
    }
}

/// Reads a score table (CSV with headers) and produces validated records.
pub fn records_from_score_table(
    table: &Path,
    image_dir: &Path,
    dataset: Dataset,
    spec: &ScoreTable,
) -> Result<Vec<CorpusRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(table)
        .map_err(|e| Error::Parse(format!("{}: {e}", table.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .clone();
    let column = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Manifest {
            path: table.to_path_buf(),
            row: 1,
            message: format!("missing column '{name}'"),
        })
    };
    let path_idx = column(&spec.path_column)?;
    let score_idx = column(&spec.score_column)?;
    let category_idx = spec.category_column.as_deref().map(column).transpose()?;

    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| Error::Parse(e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let err = |message: String| Error::Manifest {
            path: table.to_path_buf(),
            row: line,
            message,
        };
        let name = row.get(path_idx).unwrap_or("");
        let score_text = row.get(score_idx).unwrap_or("");
        let score: f64 = score_text
            .parse()
            .map_err(|_| err(format!("unparseable score '{score_text}'")))?;
        let included = dataset.validate_score(score).map_err(err)?;
        let mut file = PathBuf::from(name);
        if let (None, Some(ext)) = (file.extension(), spec.default_extension.as_deref()) {
            file.set_extension(ext);
        }
        out.push(CorpusRecord {
            image_path: image_dir.join(file),
            score,
            dataset,
            category: category_idx.and_then(|i| row.get(i)).filter(|c| !c.is_empty()).map(str::to_string),
            included,
        });
    }
    Ok(out)
}

/// Keeps only records whose image belongs to the requested DLA view.
pub fn select_dla_view(records: Vec<CorpusRecord>, view: DlaView) -> Vec<CorpusRecord> {
    records.into_iter().filter(|r| view.matches(&r.image_path)).collect()
}
