//! Plot-ready report files for a corpus run.
//!
//! A correlate run writes, into one directory:
//!
//! * `measures.csv` (or `measures.json`): one row per manifest record with the
//!   score, status and all eleven measures, ready for scatter plots.
//! * `correlations.csv`: lower-triangular Pearson matrix over `Sc` and the measures.
//! * `correlations.json`: the full matrix with p-values, pair counts, the
//!   ranking against `Sc`, and the provenance block.
//! * `summary.txt`: the ranking in plain text.
//!
//! Nothing time- or cache-dependent is written, so identical invocations give
//! identical bytes.

use std::io::Write;
use std::path::Path;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::config::{OutputFormat, Provenance, RunConfig};
use crate::corpus::{CorpusRun, Dataset, Outcome};
use crate::error::{Error, Result};
use crate::measures::{Measure, MeasureVector};
use crate::stats::{correlation_matrix, CorrelationMatrix};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const SCORE_COLUMN: &str = "Sc";
const MIN_USABLE: usize = 3;

/// Serializes the eleven measures as an ordered map (missing as `null`).
pub struct OrderedMeasures<'a>(pub &'a MeasureVector);

impl Serialize for OrderedMeasures<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(Measure::ALL.len()))?;
        for m in Measure::ALL {
            match m {
                Measure::Contours => map.serialize_entry(m.name(), &self.0.contours)?,
                Measure::Euler => map.serialize_entry(m.name(), &self.0.euler)?,
                _ => map.serialize_entry(m.name(), &self.0.get(m))?,
            }
        }
        map.end()
    }
}

/// Text form of one measure value; empty when missing.
pub fn format_measure(v: &MeasureVector, m: Measure) -> String {
    match m {
        Measure::Contours => v.contours.map(|x| x.to_string()).unwrap_or_default(),
        Measure::Euler => v.euler.map(|x| x.to_string()).unwrap_or_default(),
        _ => v.get(m).map(|x| x.to_string()).unwrap_or_default(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedMeasure {
    pub measure: String,
    pub r: f64,
    pub p: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    /// Measure with the largest |r| against the score, if any cell was defined.
    pub top: Option<String>,
    pub skew_included: bool,
    pub ranking: Vec<RankedMeasure>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationReport {
    pub schema_version: u32,
    pub dataset: Dataset,
    pub records: usize,
    pub measured: usize,
    pub failed: usize,
    pub excluded: usize,
    pub matrix: CorrelationMatrix,
    pub summary: Summary,
}

/// Correlates the score with every measure over successfully measured rows.
/// Fails when fewer than three rows are usable.
pub fn build_report(run: &CorpusRun, dataset: Dataset, include_skew: bool) -> Result<CorrelationReport> {
    let usable: Vec<(f64, &MeasureVector)> = run
        .rows
        .iter()
        .filter_map(|row| row.measures().map(|m| (row.record.score, m)))
        .collect();
    if usable.len() < MIN_USABLE {
        return Err(Error::InvalidInput(format!(
            "only {} usable record(s); at least {MIN_USABLE} are needed",
            usable.len()
        )));
    }
    let mut columns = vec![(SCORE_COLUMN.to_string(), usable.iter().map(|u| Some(u.0)).collect())];
    for m in Measure::ALL {
        columns.push((m.name().to_string(), usable.iter().map(|u| u.1.get(m)).collect()));
    }
    let matrix = correlation_matrix(&columns)?;

    let mut ranking: Vec<RankedMeasure> = Measure::ALL
        .into_iter()
        .filter(|&m| include_skew || m != Measure::Skew)
        .filter_map(|m| {
            let j = matrix.index_of(m.name())?;
            Some(RankedMeasure {
                measure: m.name().to_string(),
                r: matrix.r[0][j]?,
                p: matrix.p[0][j],
                n: matrix.n[0][j],
            })
        })
        .collect();
    // stable sort keeps report order among ties
    ranking.sort_by(|a, b| b.r.abs().total_cmp(&a.r.abs()));

    let mut failed = 0;
    let mut excluded = 0;
    for row in &run.rows {
        match row.outcome {
            Outcome::Failed { .. } => failed += 1,
            Outcome::Excluded => excluded += 1,
            Outcome::Measured { .. } => {}
        }
    }
    Ok(CorrelationReport {
        schema_version: REPORT_SCHEMA_VERSION,
        dataset,
        records: run.rows.len(),
        measured: usable.len(),
        failed,
        excluded,
        matrix,
        summary: Summary {
            top: ranking.first().map(|r| r.measure.clone()),
            skew_included: include_skew,
            ranking,
        },
    })
}

fn status(outcome: &Outcome) -> &'static str {
    match outcome {
        Outcome::Measured { .. } => "measured",
        Outcome::Failed { .. } => "failed",
        Outcome::Excluded => "excluded",
    }
}

/// The per-record table as CSV.
pub fn measures_csv(run: &CorpusRun) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["path", "score", "category", "status"];
    header.extend(Measure::ALL.iter().map(|m| m.name()));
    header.push("flags");
    w.write_record(&header).map_err(|e| Error::Parse(e.to_string()))?;
    for row in &run.rows {
        let mut fields = vec![
            row.record.image_path.to_string_lossy().into_owned(),
            row.record.score.to_string(),
            row.record.category.clone().unwrap_or_default(),
            status(&row.outcome).to_string(),
        ];
        match &row.outcome {
            Outcome::Measured { measures } => {
                fields.extend(Measure::ALL.iter().map(|&m| format_measure(measures, m)));
                fields.push(measures.flags.join("; "));
            }
            Outcome::Failed { error } => {
                fields.extend(Measure::ALL.iter().map(|_| String::new()));
                fields.push(error.clone());
            }
            Outcome::Excluded => {
                fields.extend(Measure::ALL.iter().map(|_| String::new()));
                fields.push(String::new());
            }
        }
        w.write_record(&fields).map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Serialize)]
struct MeasuresRowJson<'a> {
    path: String,
    score: f64,
    category: Option<&'a str>,
    status: &'static str,
    measures: Option<OrderedMeasures<'a>>,
    flags: Vec<String>,
}

#[derive(Serialize)]
struct MeasuresJson<'a> {
    schema_version: u32,
    provenance: Provenance<'a>,
    rows: Vec<MeasuresRowJson<'a>>,
}

/// The per-record table as JSON, with the provenance block.
pub fn measures_json(run: &CorpusRun, config: &RunConfig) -> Result<Vec<u8>> {
    let rows = run
        .rows
        .iter()
        .map(|row| MeasuresRowJson {
            path: row.record.image_path.to_string_lossy().into_owned(),
            score: row.record.score,
            category: row.record.category.as_deref(),
            status: status(&row.outcome),
            measures: row.measures().map(OrderedMeasures),
            flags: match &row.outcome {
                Outcome::Measured { measures } => measures.flags.clone(),
                Outcome::Failed { error } => vec![error.clone()],
                Outcome::Excluded => Vec::new(),
            },
        })
        .collect();
    let doc = MeasuresJson {
        schema_version: REPORT_SCHEMA_VERSION,
        provenance: Provenance::new(config),
        rows,
    };
    to_json(&doc)
}

#[derive(Serialize)]
struct CorrelationsJson<'a> {
    provenance: Provenance<'a>,
    #[serde(flatten)]
    report: &'a CorrelationReport,
}

pub fn correlations_json(report: &CorrelationReport, config: &RunConfig) -> Result<Vec<u8>> {
    to_json(&CorrelationsJson {
        provenance: Provenance::new(config),
        report,
    })
}

pub fn summary_text(report: &CorrelationReport, config: &RunConfig) -> Result<String> {
    let mut s = String::new();
    s.push_str(&format!("dataset: {}\n", report.dataset));
    s.push_str(&format!(
        "records: {} (measured {}, failed {}, excluded {})\n",
        report.records, report.measured, report.failed, report.excluded
    ));
    match &report.summary.top {
        Some(top) => s.push_str(&format!("top measure vs {SCORE_COLUMN}: {top}\n")),
        None => s.push_str(&format!("top measure vs {SCORE_COLUMN}: none (no defined correlations)\n")),
    }
    s.push_str(&format!("skew included in ranking: {}\n\n", report.summary.skew_included));
    s.push_str("measure      r           p            n\n");
    for r in &report.summary.ranking {
        let p = r.p.map(|p| format!("{p:.3e}")).unwrap_or_else(|| "-".into());
        s.push_str(&format!("{:<12} {:<+11.6} {:<12} {}\n", r.measure, r.r, p, r.n));
    }
    s.push('\n');
    s.push_str("provenance: ");
    s.push_str(&String::from_utf8(to_json_compact(&Provenance::new(config))?).expect("json is utf-8"));
    s.push('\n');
    Ok(s)
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

fn to_json_compact<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    serde_json::to_vec(value).map_err(|e| Error::Parse(e.to_string()))
}

/// Writes every report file into `dir`, creating it if needed.
pub fn write_reports(dir: &Path, run: &CorpusRun, report: &CorrelationReport, config: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let write = |name: &str, bytes: &[u8]| {
        let path = dir.join(name);
        std::fs::File::create(&path)
            .and_then(|mut f| f.write_all(bytes))
            .map_err(|e| Error::io(&path, e))
    };
    match config.format {
        OutputFormat::Csv => write("measures.csv", &measures_csv(run)?)?,
        OutputFormat::Json => write("measures.json", &measures_json(run, config)?)?,
    }
    write("correlations.csv", report.matrix.to_csv().as_bytes())?;
    write("correlations.json", &correlations_json(report, config)?)?;
    write("summary.txt", summary_text(report, config)?.as_bytes())?;
    Ok(())
}
