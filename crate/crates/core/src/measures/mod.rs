//! The per-image complexity measures and the combined evaluator.

pub mod compression;
pub mod fractal;
pub mod intensity;
pub mod topology;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use compression::{
    algorithmic_complexity, mc_complexity, mc_complexity_edges, mc_complexity_with, structural_complexity,
};
pub use fractal::{
    aesthetic_from_dimension, box_counting, fractal_aesthetic, fractal_dimension, BoxCounting, BoxGrid,
    FractalAestheticParams,
};
pub use intensity::{energy, energy_of, entropy, entropy_of, skew};
pub use topology::{contours, euler, topology_of, Topology};

use crate::codec::{rms_error, BlockDctCodec, LossyCodec, LossyCodecParams};
use crate::error::{Error, Result};
use crate::image::{histogram, GrayImage, DEFAULT_BINS};
use crate::preprocess::{
    adaptive_binarize, coarse_grain, morphological_binarize_with, sobel_edges, AdaptiveBinarizationParams,
    StructuralParams,
};

/// The eleven per-image measures, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Measure {
    Entropy,
    Energy,
    Contours,
    Euler,
    Algorithmic,
    Structural,
    MachadoCardoso,
    MachadoCardosoEdges,
    FractalDimension,
    FractalAesthetic,
    Skew,
}

impl Measure {
    pub const ALL: [Measure; 11] = [
        Measure::Entropy,
        Measure::Energy,
        Measure::Contours,
        Measure::Euler,
        Measure::Algorithmic,
        Measure::Structural,
        Measure::MachadoCardoso,
        Measure::MachadoCardosoEdges,
        Measure::FractalDimension,
        Measure::FractalAesthetic,
        Measure::Skew,
    ];

    /// Short column name.
    pub fn name(self) -> &'static str {
        match self {
            Measure::Entropy => "S",
            Measure::Energy => "E",
            Measure::Contours => "T",
            Measure::Euler => "gamma",
            Measure::Algorithmic => "C_a",
            Measure::Structural => "C_s",
            Measure::MachadoCardoso => "C_mc",
            Measure::MachadoCardosoEdges => "C_mc_E",
            Measure::FractalDimension => "D",
            Measure::FractalAesthetic => "D_a",
            Measure::Skew => "skew",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown measure '{s}'")))
    }
}

/// One image's measurements. `None` marks a measure that could not be evaluated.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MeasureVector {
    #[serde(rename = "S")]
    pub entropy: Option<f64>,
    #[serde(rename = "E")]
    pub energy: Option<f64>,
    #[serde(rename = "T")]
    pub contours: Option<u64>,
    #[serde(rename = "gamma")]
    pub euler: Option<i64>,
    #[serde(rename = "C_a")]
    pub algorithmic: Option<f64>,
    #[serde(rename = "C_s")]
    pub structural: Option<f64>,
    #[serde(rename = "C_mc")]
    pub mc: Option<f64>,
    #[serde(rename = "C_mc_E")]
    pub mc_edges: Option<f64>,
    #[serde(rename = "D")]
    pub fractal_dimension: Option<f64>,
    #[serde(rename = "D_a")]
    pub fractal_aesthetic: Option<f64>,
    pub skew: Option<f64>,
    /// Degenerate cases and per-measure failures.
    #[serde(default)]
    pub flags: Vec<String>,
}

impl MeasureVector {
    pub fn get(&self, m: Measure) -> Option<f64> {
        match m {
            Measure::Entropy => self.entropy,
            Measure::Energy => self.energy,
            Measure::Contours => self.contours.map(|v| v as f64),
            Measure::Euler => self.euler.map(|v| v as f64),
            Measure::Algorithmic => self.algorithmic,
            Measure::Structural => self.structural,
            Measure::MachadoCardoso => self.mc,
            Measure::MachadoCardosoEdges => self.mc_edges,
            Measure::FractalDimension => self.fractal_dimension,
            Measure::FractalAesthetic => self.fractal_aesthetic,
            Measure::Skew => self.skew,
        }
    }

    pub fn missing(&self) -> Vec<Measure> {
        Measure::ALL.into_iter().filter(|&m| self.get(m).is_none()).collect()
    }
}

/// All measure parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureConfig {
    pub structural: StructuralParams,
    pub adaptive: AdaptiveBinarizationParams,
    pub fractal_aesthetic: FractalAestheticParams,
    pub lossy: LossyCodecParams,
    /// Histogram bins for entropy and energy.
    pub bins: usize,
    #[serde(default)]
    pub box_grid: BoxGrid,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        Self {
            structural: StructuralParams::default(),
            adaptive: AdaptiveBinarizationParams::default(),
            fractal_aesthetic: FractalAestheticParams::default(),
            lossy: LossyCodecParams::default(),
            bins: DEFAULT_BINS,
            box_grid: BoxGrid::Origin,
        }
    }
}

impl MeasureConfig {
    pub fn validate(&self) -> Result<()> {
        self.structural.validate()?;
        self.adaptive.validate()?;
        self.fractal_aesthetic.validate()?;
        self.lossy.validate()?;
        if self.bins < 2 {
            return Err(Error::InvalidParameter(format!(
                "histogram needs at least 2 bins, got {}",
                self.bins
            )));
        }
        Ok(())
    }
}

/// Evaluates every measure with the in-repo lossy codec.
pub fn measure_all(img: &GrayImage, config: &MeasureConfig) -> Result<MeasureVector> {
    measure_all_with(img, config, &BlockDctCodec)
}

/// Evaluates every measure, sharing the histogram, binarizations and codec
/// passes. Per-measure failures become missing values plus a flag.
pub fn measure_all_with(img: &GrayImage, config: &MeasureConfig, codec: &dyn LossyCodec) -> Result<MeasureVector> {
    config.validate()?;
    let mut v = MeasureVector::default();
    let mut flags: Vec<String> = Vec::new();
    let record = |flags: &mut Vec<String>, m: Measure, e: &Error| flags.push(format!("{}: {e}", m.name()));

    let luminance = histogram(img, DEFAULT_BINS)?;
    let binned = if config.bins == DEFAULT_BINS {
        luminance.clone()
    } else {
        histogram(img, config.bins)?
    };
    v.entropy = Some(entropy_of(&binned));
    v.energy = Some(energy_of(&binned));

    let morph = morphological_binarize_with(img, &luminance);
    if morph.degenerate {
        v.contours = Some(0);
        v.euler = Some(0);
        flags.push("binarization: degenerate".into());
    } else {
        let topo = topology_of(&morph.image);
        v.contours = Some(topo.contours());
        v.euler = Some(topo.euler());
    }

    v.algorithmic = Some(algorithmic_complexity(img));
    match coarse_grain(img, &config.structural) {
        Ok(levels) => v.structural = Some(compression::structural_from_levels(&levels)),
        Err(e) => record(&mut flags, Measure::Structural, &e),
    }

    match mc_complexity_with(codec, img, config.lossy) {
        Ok(c) => v.mc = Some(c),
        Err(e) => record(&mut flags, Measure::MachadoCardoso, &e),
    }
    match sobel_edges(img).and_then(|edges| mc_complexity_with(codec, &edges, config.lossy)) {
        Ok(c) => v.mc_edges = Some(c),
        Err(e) => record(&mut flags, Measure::MachadoCardosoEdges, &e),
    }

    let boxes = adaptive_binarize(img, config.adaptive).and_then(|fg| {
        if fractal::box_sizes(img.width(), img.height()).len() < fractal::MIN_BOX_SIZES {
            // same error path as fractal_dimension
            return fractal_dimension(img, config.adaptive);
        }
        box_counting(&fg, config.box_grid)
    });
    match boxes {
        Ok(b) => {
            if b.degenerate {
                flags.push("D: degenerate (empty foreground)".into());
            }
            v.fractal_dimension = Some(b.dimension);
            v.fractal_aesthetic = Some(aesthetic_from_dimension(b.dimension, config.fractal_aesthetic));
        }
        Err(e) => {
            record(&mut flags, Measure::FractalDimension, &e);
            record(&mut flags, Measure::FractalAesthetic, &e);
        }
    }

    match skew(img) {
        Ok(s) => v.skew = Some(s),
        Err(e) => record(&mut flags, Measure::Skew, &e),
    }

    v.flags = flags;
    Ok(v)
}

/// Lossy reconstruction and its RMS against the input, as used by `C_mc`.
pub fn lossy_roundtrip(img: &GrayImage, params: LossyCodecParams) -> Result<(GrayImage, f64)> {
    let enc = BlockDctCodec.encode(img, params)?;
    let rms = rms_error(img, &enc.reconstruction)?;
    Ok((enc.reconstruction, rms))
}
