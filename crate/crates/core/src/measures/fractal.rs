//! Box-counting fractal dimension and the Gaussian fractal aesthetic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{BinaryImage, GrayImage};
use crate::preprocess::{adaptive_binarize, AdaptiveBinarizationParams};

/// Minimum number of box sizes needed for a slope fit.
pub const MIN_BOX_SIZES: usize = 4;

/// Peak and width of the preferred-dimension curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractalAestheticParams {
    pub peak: f64,
    pub sigma: f64,
}

impl FractalAestheticParams {
    pub fn new(peak: f64, sigma: f64) -> Result<Self> {
        let p = Self { peak, sigma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !self.peak.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "fractal aesthetic needs finite peak and sigma > 0, got ({}, {})",
                self.peak, self.sigma
            )));
        }
        Ok(())
    }
}

impl Default for FractalAestheticParams {
    fn default() -> Self {
        Self {
            peak: 1.35,
            sigma: 0.2,
        }
    }
}

/// Grid placement for box counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoxGrid {
    /// A single grid anchored at the origin.
    #[default]
    Origin,
    /// Mean count over the four grids offset by `0` or `s/2` on each axis.
    OffsetAveraged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxCounting {
    pub dimension: f64,
    /// Set when the foreground is empty; the dimension is then 0.
    pub degenerate: bool,
    pub sizes: Vec<usize>,
    pub counts: Vec<f64>,
}

/// Box sizes 2, 4, 8, … up to half the shorter side.
pub fn box_sizes(width: usize, height: usize) -> Vec<usize> {
    let limit = width.min(height) / 2;
    std::iter::successors(Some(2usize), |s| Some(s * 2))
        .take_while(|&s| s <= limit)
        .collect()
}

fn occupied_cells(fg: &[(usize, usize)], w: usize, h: usize, s: usize, ox: usize, oy: usize) -> usize {
    // cell index of pixel p is (p + offset) / s, partial cells included
    let cols = (w + ox).div_ceil(s);
    let rows = (h + oy).div_ceil(s);
    let mut occupied = vec![false; cols * rows];
    let mut n = 0;
    for &(x, y) in fg {
        let c = ((y + oy) / s) * cols + (x + ox) / s;
        if !occupied[c] {
            occupied[c] = true;
            n += 1;
        }
    }
    n
}

/// Least-squares slope of `y` on `x`.
pub(crate) fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Box-counting dimension of a foreground mask.
pub fn box_counting(fg: &BinaryImage, grid: BoxGrid) -> Result<BoxCounting> {
    let (w, h) = (fg.width(), fg.height());
    let sizes = box_sizes(w, h);
    if sizes.len() < MIN_BOX_SIZES {
        return Err(Error::InvalidInput(format!(
            "{w}x{h} image allows only {} box sizes, need {MIN_BOX_SIZES}",
            sizes.len()
        )));
    }
    let pixels: Vec<(usize, usize)> = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .filter(|&(x, y)| fg.get(x, y))
        .collect();
    if pixels.is_empty() {
        return Ok(BoxCounting {
            dimension: 0.0,
            degenerate: true,
            counts: vec![0.0; sizes.len()],
            sizes,
        });
    }
    let counts: Vec<f64> = sizes
        .iter()
        .map(|&s| match grid {
            BoxGrid::Origin => occupied_cells(&pixels, w, h, s, 0, 0) as f64,
            BoxGrid::OffsetAveraged => {
                let half = s / 2;
                let total: usize = [(0, 0), (half, 0), (0, half), (half, half)]
                    .iter()
                    .map(|&(ox, oy)| occupied_cells(&pixels, w, h, s, ox, oy))
                    .sum();
                total as f64 / 4.0
            }
        })
        .collect();
    let log_inv_s: Vec<f64> = sizes.iter().map(|&s| -(s as f64).ln()).collect();
    let log_n: Vec<f64> = counts.iter().map(|n| n.ln()).collect();
    Ok(BoxCounting {
        dimension: slope(&log_inv_s, &log_n),
        degenerate: false,
        sizes,
        counts,
    })
}

/// Fractal dimension of the adaptively binarized image.
pub fn fractal_dimension(img: &GrayImage, binarization: AdaptiveBinarizationParams) -> Result<BoxCounting> {
    if box_sizes(img.width(), img.height()).len() < MIN_BOX_SIZES {
        return Err(Error::InvalidInput(format!(
            "{}x{} image is too small for box counting",
            img.width(),
            img.height()
        )));
    }
    let fg = adaptive_binarize(img, binarization)?;
    box_counting(&fg, BoxGrid::Origin)
}

/// `exp(-(d - peak)² / (2σ²))`.
pub fn aesthetic_from_dimension(d: f64, params: FractalAestheticParams) -> f64 {
    let z = d - params.peak;
    (-(z * z) / (2.0 * params.sigma * params.sigma)).exp()
}

pub fn fractal_aesthetic(
    img: &GrayImage,
    fa: FractalAestheticParams,
    binarization: AdaptiveBinarizationParams,
) -> Result<f64> {
    fa.validate()?;
    let d = fractal_dimension(img, binarization)?;
    Ok(aesthetic_from_dimension(d.dimension, fa))
}
