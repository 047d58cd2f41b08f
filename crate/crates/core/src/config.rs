//! Run-level configuration and the `key = value` config-file format.
//!
//! A config file holds one setting per line; `#` starts a comment. Keys match
//! the long CLI flag names:
//!
//! ```text
//! rcg = 5
//! delta = 0.23
//! eta = darkness
//! fractal-radius = 2
//! quality = 0.75
//! fa-peak = 1.35
//! fa-sigma = 0.2
//! bins = 256
//! box-grid = origin
//! workers = 4
//! cache-dir = /tmp/cache
//! format = json
//! ```
//!
//! Values given on the command line override the file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::codec::CODEC_VERSION;
use crate::error::{Error, Result};
use crate::measures::{BoxGrid, MeasureConfig};
use crate::preprocess::EtaOrientation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidParameter(format!("unknown format '{other}' (csv|json)"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Everything that determines a run's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub measures: MeasureConfig,
    /// Worker threads; 0 lets the pool pick.
    pub workers: usize,
    pub cache_dir: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            measures: MeasureConfig::default(),
            workers: 0,
            cache_dir: None,
            format: OutputFormat::Csv,
        }
    }
}

/// Optional overrides, one per config key. Used for both the file and the CLI.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub rcg: Option<usize>,
    pub delta: Option<f64>,
    pub eta: Option<EtaOrientation>,
    pub fractal_radius: Option<usize>,
    pub quality: Option<f64>,
    pub fa_peak: Option<f64>,
    pub fa_sigma: Option<f64>,
    pub bins: Option<usize>,
    pub box_grid: Option<BoxGrid>,
    pub workers: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Parse(format!("config line {line}: bad value '{value}' for '{key}'")))
}

pub fn parse_eta(s: &str) -> Result<EtaOrientation> {
    match s.to_ascii_lowercase().as_str() {
        "darkness" => Ok(EtaOrientation::Darkness),
        "brightness" => Ok(EtaOrientation::Brightness),
        other => Err(Error::InvalidParameter(format!("unknown eta orientation '{other}'"))),
    }
}

pub fn parse_box_grid(s: &str) -> Result<BoxGrid> {
    match s.to_ascii_lowercase().as_str() {
        "origin" => Ok(BoxGrid::Origin),
        "offset-averaged" => Ok(BoxGrid::OffsetAveraged),
        other => Err(Error::InvalidParameter(format!("unknown box grid '{other}'"))),
    }
}

impl ConfigOverrides {
    pub fn parse(text: &str) -> Result<Self> {
        let mut o = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {line_no}: expected key = value")))?;
            let (key, value) = (key.trim().replace('_', "-"), value.trim());
            let k = key.as_str();
            match k {
                "rcg" => o.rcg = Some(parse_value(k, value, line_no)?),
                "delta" => o.delta = Some(parse_value(k, value, line_no)?),
                "eta" => o.eta = Some(parse_eta(value)?),
                "fractal-radius" | "r" => o.fractal_radius = Some(parse_value(k, value, line_no)?),
                "quality" => o.quality = Some(parse_value(k, value, line_no)?),
                "fa-peak" => o.fa_peak = Some(parse_value(k, value, line_no)?),
                "fa-sigma" => o.fa_sigma = Some(parse_value(k, value, line_no)?),
                "bins" => o.bins = Some(parse_value(k, value, line_no)?),
                "box-grid" => o.box_grid = Some(parse_box_grid(value)?),
                "workers" => o.workers = Some(parse_value(k, value, line_no)?),
                "cache-dir" => o.cache_dir = Some(PathBuf::from(value)),
                "format" => o.format = Some(value.parse()?),
                _ => return Err(Error::Parse(format!("config line {line_no}: unknown key '{key}'"))),
            }
        }
        Ok(o)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Values set in `self` win over those in `base`.
    pub fn over(self, base: Self) -> Self {
        Self {
            rcg: self.rcg.or(base.rcg),
            delta: self.delta.or(base.delta),
            eta: self.eta.or(base.eta),
            fractal_radius: self.fractal_radius.or(base.fractal_radius),
            quality: self.quality.or(base.quality),
            fa_peak: self.fa_peak.or(base.fa_peak),
            fa_sigma: self.fa_sigma.or(base.fa_sigma),
            bins: self.bins.or(base.bins),
            box_grid: self.box_grid.or(base.box_grid),
            workers: self.workers.or(base.workers),
            cache_dir: self.cache_dir.or(base.cache_dir),
            format: self.format.or(base.format),
        }
    }

    /// Applies the overrides to the defaults and validates the result.
    pub fn resolve(self) -> Result<RunConfig> {
        let mut c = RunConfig::default();
        let m = &mut c.measures;
        if let Some(v) = self.rcg {
            m.structural.radius = v;
        }
        if let Some(v) = self.delta {
            m.structural.delta = v;
        }
        if let Some(v) = self.eta {
            m.structural.orientation = v;
        }
        if let Some(v) = self.fractal_radius {
            m.adaptive.radius = v;
        }
        if let Some(v) = self.quality {
            m.lossy.quality = v;
        }
        if let Some(v) = self.fa_peak {
            m.fractal_aesthetic.peak = v;
        }
        if let Some(v) = self.fa_sigma {
            m.fractal_aesthetic.sigma = v;
        }
        if let Some(v) = self.bins {
            m.bins = v;
        }
        if let Some(v) = self.box_grid {
            m.box_grid = v;
        }
        m.validate()?;
        c.workers = self.workers.unwrap_or(0);
        c.cache_dir = self.cache_dir;
        c.format = self.format.unwrap_or_default();
        Ok(c)
    }
}

/// The configuration block embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance<'a> {
    pub tool_version: &'static str,
    pub codec_version: &'static str,
    pub config: &'a RunConfig,
}

impl<'a> Provenance<'a> {
    pub fn new(config: &'a RunConfig) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION"),
            codec_version: CODEC_VERSION,
            config,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_reference_settings() {
        let c = ConfigOverrides::default().resolve().unwrap();
        assert_eq!(c.measures, MeasureConfig::default());
        assert_eq!(c.measures.structural.radius, 5);
        assert_eq!(c.measures.structural.delta, 0.23);
        assert_eq!(c.measures.adaptive.radius, 2);
        assert_eq!(c.measures.lossy.quality, 0.75);
    }

    #[test]
    fn file_parses_and_flags_win() {
        let file = ConfigOverrides::parse("# comment\nrcg = 3\ndelta=0.1 # trailing\nformat = json\nbox_grid = offset-averaged\n").unwrap();
        let flags = ConfigOverrides {
            rcg: Some(7),
            ..Default::default()
        };
        let c = flags.over(file).resolve().unwrap();
        assert_eq!(c.measures.structural.radius, 7);
        assert_eq!(c.measures.structural.delta, 0.1);
        assert_eq!(c.format, OutputFormat::Json);
        assert_eq!(c.measures.box_grid, BoxGrid::OffsetAveraged);
    }

    #[test]
    fn bad_lines_are_rejected() {
        assert!(ConfigOverrides::parse("rcg 5").is_err());
        assert!(ConfigOverrides::parse("colour = red").is_err());
        assert!(ConfigOverrides::parse("delta = lots").is_err());
        let bad = ConfigOverrides {
            delta: Some(0.7),
            ..Default::default()
        };
        assert!(bad.resolve().is_err());
    }
}
