//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error (bad flags or parameter values),
//! 2 data error (unreadable inputs, bad manifests, too few usable records).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{parse_box_grid, parse_eta, ConfigOverrides, OutputFormat, RunConfig};
use crate::corpus::adapters::{records_from_score_table, select_dla_view, DlaView, ScoreTable};
use crate::corpus::cache::CACHE_FILE_NAME;
use crate::corpus::{load_manifest, run_corpus, write_manifest, Dataset, MeasureCache, CACHE_DIR_ENV};
use crate::error::Error;
use crate::geometry::{physical_complexity, LayeredForm};
use crate::image::GrayImage;
use crate::measures::{lossy_roundtrip, measure_all, Measure};
use crate::preprocess::{adaptive_binarize, coarse_grain, morphological_binarize, sobel_edges};
use crate::report::{build_report, format_measure, write_reports, OrderedMeasures};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "artcomplexity", version, about = "Image complexity measures for generative art")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Stage {
    MorphBinarize,
    AdaptiveBinarize,
    Sobel,
    CoarseGrain,
    LossyRoundtrip,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ViewArg {
    Perspective,
    Orthographic,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print all eleven measures for one image.
    Measure {
        image: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Measure a scored corpus and write correlation reports.
    Correlate {
        manifest: PathBuf,
        /// Score convention: lomas, dla3d, linedrawing or custom.
        #[arg(long, default_value = "custom")]
        dataset: String,
        /// Report directory.
        #[arg(long)]
        out: PathBuf,
        /// Let skew compete for the top measure.
        #[arg(long)]
        include_skew: bool,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Write an intermediate raster as PNG.
    Preview {
        image: PathBuf,
        #[arg(value_enum)]
        stage: Stage,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Physical complexity of a layered form (text or .json).
    Physical {
        form: PathBuf,
        #[arg(long)]
        format: Option<String>,
    },
    /// Build a manifest from a dataset's score table.
    Manifest {
        #[arg(long)]
        scores: PathBuf,
        /// Directory image names are resolved against.
        #[arg(long)]
        images: PathBuf,
        #[arg(long)]
        dataset: String,
        #[arg(long, default_value = "path")]
        path_column: String,
        #[arg(long, default_value = "score")]
        score_column: String,
        #[arg(long)]
        category_column: Option<String>,
        /// Extension added to names that have none.
        #[arg(long)]
        extension: Option<String>,
        /// DLA render view; defaults to perspective for dla3d.
        #[arg(long, value_enum)]
        view: Option<ViewArg>,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args, Clone, Default)]
struct ParamArgs {
    /// Coarse-graining radius.
    #[arg(long)]
    rcg: Option<usize>,
    /// Trinarization threshold in [0, 0.5].
    #[arg(long)]
    delta: Option<f64>,
    /// What the coarse-grained value measures: darkness or brightness.
    #[arg(long)]
    eta: Option<String>,
    /// Adaptive binarization radius for box counting.
    #[arg(long = "fractal-radius", visible_alias = "r")]
    fractal_radius: Option<usize>,
    /// Lossy codec quality in (0, 1].
    #[arg(long)]
    quality: Option<f64>,
    #[arg(long)]
    fa_peak: Option<f64>,
    #[arg(long)]
    fa_sigma: Option<f64>,
    /// Histogram bins for entropy and energy.
    #[arg(long)]
    bins: Option<usize>,
    /// Box-counting grid: origin or offset-averaged.
    #[arg(long)]
    box_grid: Option<String>,
    /// key = value settings, overridden by flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Measure cache directory (default: $ARTCOMPLEXITY_CACHE_DIR).
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

type CliResult = std::result::Result<(), Failure>;

fn io_failure(e: std::io::Error) -> Failure {
    Failure::Data(format!("output: {e}"))
}

impl ParamArgs {
    fn resolve(&self) -> std::result::Result<RunConfig, Failure> {
        let usage = |e: Error| Failure::Usage(e.to_string());
        let flags = ConfigOverrides {
            rcg: self.rcg,
            delta: self.delta,
            eta: self.eta.as_deref().map(parse_eta).transpose().map_err(usage)?,
            fractal_radius: self.fractal_radius,
            quality: self.quality,
            fa_peak: self.fa_peak,
            fa_sigma: self.fa_sigma,
            bins: self.bins,
            box_grid: self.box_grid.as_deref().map(parse_box_grid).transpose().map_err(usage)?,
            workers: self.workers,
            cache_dir: self.cache_dir.clone(),
            format: self.format.as_deref().map(str::parse).transpose().map_err(usage)?,
        };
        let file = match &self.config {
            Some(path) => ConfigOverrides::load(path).map_err(|e| match e {
                Error::Io { .. } => Failure::Data(e.to_string()),
                other => Failure::Usage(other.to_string()),
            })?,
            None => ConfigOverrides::default(),
        };
        flags.over(file).resolve().map_err(usage)
    }
}

fn parse_dataset(tag: &str) -> std::result::Result<Dataset, Failure> {
    tag.parse().map_err(|e: Error| Failure::Usage(e.to_string()))
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
                    if e.exit_code() == 0 =>
                {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Measure { image, params } => cmd_measure(&image, &params, out, err),
        Command::Correlate {
            manifest,
            dataset,
            out: dir,
            include_skew,
            params,
        } => cmd_correlate(&manifest, &dataset, &dir, include_skew, &params, out, err),
        Command::Preview {
            image,
            stage,
            out: path,
            params,
        } => cmd_preview(&image, stage, &path, &params, out),
        Command::Physical { form, format } => cmd_physical(&form, format.as_deref(), out, err),
        Command::Manifest {
            scores,
            images,
            dataset,
            path_column,
            score_column,
            category_column,
            extension,
            view,
            out: path,
        } => {
            let spec = ScoreTable {
                path_column,
                score_column,
                category_column,
                default_extension: extension,
            };
            cmd_manifest(&scores, &images, &dataset, &spec, view, path.as_deref(), out)
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Data(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_DATA
        }
    }
}

fn cmd_measure(image: &Path, params: &ParamArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let config = params.resolve()?;
    let img = GrayImage::load(image)?;
    let v = measure_all(&img, &config.measures)?;
    for flag in &v.flags {
        writeln!(err, "warning: {flag}").map_err(io_failure)?;
    }
    match config.format {
        OutputFormat::Json => {
            let text = serde_json::to_string(&OrderedMeasures(&v)).map_err(|e| Failure::Data(e.to_string()))?;
            writeln!(out, "{text}").map_err(io_failure)?;
        }
        OutputFormat::Csv => {
            let names: Vec<&str> = Measure::ALL.iter().map(|m| m.name()).collect();
            let values: Vec<String> = Measure::ALL.iter().map(|&m| format_measure(&v, m)).collect();
            writeln!(out, "{}\n{}", names.join(","), values.join(",")).map_err(io_failure)?;
        }
    }
    Ok(())
}

fn open_cache(config: &RunConfig) -> std::result::Result<Option<MeasureCache>, Failure> {
    let dir = config
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os(CACHE_DIR_ENV).filter(|d| !d.is_empty()).map(PathBuf::from));
    Ok(match dir {
        Some(dir) => Some(MeasureCache::open(dir.join(CACHE_FILE_NAME))?),
        None => None,
    })
}

fn cmd_correlate(
    manifest: &Path,
    dataset: &str,
    dir: &Path,
    include_skew: bool,
    params: &ParamArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult {
    let config = params.resolve()?;
    let dataset = parse_dataset(dataset)?;
    let records = load_manifest(manifest, dataset)?;
    let cache = open_cache(&config)?;
    if let Some(c) = cache.as_ref().filter(|c| c.skipped_lines() > 0) {
        writeln!(err, "warning: cache: skipped {} unreadable line(s)", c.skipped_lines()).map_err(io_failure)?;
    }
    let run = run_corpus(&records, &config.measures, config.workers, cache.as_ref())?;
    for row in &run.rows {
        if let crate::corpus::Outcome::Failed { error } = &row.outcome {
            writeln!(err, "warning: {}: {error}", row.record.image_path.display()).map_err(io_failure)?;
        }
    }
    writeln!(
        err,
        "measured {} (cache hits {}, computed {}), failed {}, excluded {}",
        run.stats.measured, run.stats.cache_hits, run.stats.decoded, run.stats.failed, run.stats.excluded
    )
    .map_err(io_failure)?;
    let report = build_report(&run, dataset, include_skew)?;
    write_reports(dir, &run, &report, &config)?;
    match &report.summary.top {
        Some(top) => writeln!(out, "top measure: {top}"),
        None => writeln!(out, "top measure: none"),
    }
    .map_err(io_failure)?;
    Ok(())
}

fn cmd_preview(image: &Path, stage: Stage, path: &Path, params: &ParamArgs, out: &mut dyn Write) -> CliResult {
    let config = params.resolve()?;
    let m = &config.measures;
    let img = GrayImage::load(image)?;
    let raster = match stage {
        Stage::MorphBinarize => morphological_binarize(&img).image.to_gray(),
        Stage::AdaptiveBinarize => adaptive_binarize(&img, m.adaptive)?.to_gray(),
        Stage::Sobel => sobel_edges(&img)?,
        Stage::CoarseGrain => coarse_grain(&img, &m.structural)?.to_gray(),
        Stage::LossyRoundtrip => {
            let (recon, rms) = lossy_roundtrip(&img, m.lossy)?;
            writeln!(out, "rms: {rms}").map_err(io_failure)?;
            recon
        }
    };
    raster.save_png(path)?;
    Ok(())
}

fn cmd_physical(form: &Path, format: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let format: OutputFormat = format
        .map(str::parse)
        .transpose()
        .map_err(|e: Error| Failure::Usage(e.to_string()))?
        .unwrap_or_default();
    let form = LayeredForm::load(form)?;
    let pc = physical_complexity(&form);
    for flag in &pc.flags {
        writeln!(err, "warning: {flag}").map_err(io_failure)?;
    }
    match format {
        OutputFormat::Json => {
            let text = serde_json::to_string(&pc).map_err(|e| Failure::Data(e.to_string()))?;
            writeln!(out, "{text}")
        }
        OutputFormat::Csv => {
            let mut s = String::from("layer,convexity_deviation,angle_qcd,score\n");
            for (i, l) in pc.layers.iter().enumerate() {
                let qcd = l.qcd.map(|q| q.to_string()).unwrap_or_default();
                s.push_str(&format!("{i},{},{qcd},{}\n", l.convexity.value, l.score));
            }
            s.push_str(&format!("all,,,{}", pc.score));
            writeln!(out, "{s}")
        }
    }
    .map_err(io_failure)
}

fn cmd_manifest(
    scores: &Path,
    images: &Path,
    dataset: &str,
    spec: &ScoreTable,
    view: Option<ViewArg>,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> CliResult {
    let dataset = parse_dataset(dataset)?;
    let mut records = records_from_score_table(scores, images, dataset, spec)?;
    let view = match (view, dataset) {
        (Some(ViewArg::Perspective), _) | (None, Dataset::Dla3d) => Some(DlaView::Perspective),
        (Some(ViewArg::Orthographic), _) => Some(DlaView::Orthographic),
        (None, _) => None,
    };
    if let Some(view) = view {
        records = select_dla_view(records, view);
    }
    let mut buf = Vec::new();
    write_manifest(&records, &mut buf)?;
    match path {
        Some(p) => std::fs::write(p, &buf).map_err(|e| Failure::Data(format!("{}: {e}", p.display())))?,
        None => out.write_all(&buf).map_err(io_failure)?,
    }
    Ok(())
}
