//! Parallel, cache-backed evaluation of a corpus.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cache::{content_hash, fingerprint, MeasureCache};
use super::manifest::CorpusRecord;
use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::measures::{measure_all, MeasureConfig, MeasureVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Outcome {
    Measured { measures: MeasureVector },
    Failed { error: String },
    /// Excluded by the dataset's score convention; never measured.
    Excluded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub record: CorpusRecord,
    pub outcome: Outcome,
}

impl RunRow {
    pub fn measures(&self) -> Option<&MeasureVector> {
        match &self.outcome {
            Outcome::Measured { measures } => Some(measures),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunStats {
    pub measured: usize,
    pub cache_hits: usize,
    pub decoded: usize,
    pub failed: usize,
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusRun {
    pub rows: Vec<RunRow>,
    pub stats: RunStats,
}

enum Evaluated {
    Hit(MeasureVector),
    Fresh(MeasureVector),
}

fn evaluate(record: &CorpusRecord, config: &MeasureConfig, fp: &str, cache: Option<&MeasureCache>) -> Result<Evaluated> {
    let bytes = std::fs::read(&record.image_path).map_err(|e| Error::io(&record.image_path, e))?;
    let hash = content_hash(&bytes);
    if let Some(v) = cache.and_then(|c| c.get(&hash, fp)) {
        return Ok(Evaluated::Hit(v));
    }
    let img = GrayImage::decode(&bytes).map_err(|e| match e {
        Error::Decode { message, .. } => Error::Decode {
            path: record.image_path.clone(),
            message,
        },
        other => other,
    })?;
    let v = measure_all(&img, config)?;
    if let Some(c) = cache {
        c.insert(&hash, fp, &v)?;
    }
    Ok(Evaluated::Fresh(v))
}

/// Measures every included record on a pool of `workers` threads (0 = rayon
/// default). Output order follows the input; failures are recorded per row.
pub fn run_corpus(
    records: &[CorpusRecord],
    config: &MeasureConfig,
    workers: usize,
    cache: Option<&MeasureCache>,
) -> Result<CorpusRun> {
    config.validate()?;
    let fp = fingerprint(config);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;

    let evaluated: Vec<Option<Result<Evaluated>>> = pool.install(|| {
        records
            .par_iter()
            .map(|r| r.included.then(|| evaluate(r, config, &fp, cache)))
            .collect()
    });

    let mut stats = RunStats::default();
    let rows = records
        .iter()
        .zip(evaluated)
        .map(|(record, ev)| {
            let outcome = match ev {
                None => {
                    stats.excluded += 1;
                    Outcome::Excluded
                }
                Some(Ok(Evaluated::Hit(measures))) => {
                    stats.measured += 1;
                    stats.cache_hits += 1;
                    Outcome::Measured { measures }
                }
                Some(Ok(Evaluated::Fresh(measures))) => {
                    stats.measured += 1;
                    stats.decoded += 1;
                    Outcome::Measured { measures }
                }
                Some(Err(e)) => {
                    stats.failed += 1;
                    Outcome::Failed { error: e.to_string() }
                }
            };
            RunRow {
                record: record.clone(),
                outcome,
            }
        })
        .collect();
    Ok(CorpusRun { rows, stats })
}
