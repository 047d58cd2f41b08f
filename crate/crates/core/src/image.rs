//! Raster types shared by every measure: normalized grayscale, binary and
//! three-level images, plus luminance histograms and file IO.

use std::path::Path;

use image::{DynamicImage, ImageReader};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rec. 709 luma weights.
pub const LUMA_WEIGHTS: [f64; 3] = [0.2126, 0.7152, 0.0722];

/// Default number of histogram bins (matches 8-bit sources).
pub const DEFAULT_BINS: usize = 256;

/// Grayscale raster with intensities in `[0, 1]`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput(format!(
                "zero-dimension raster ({width}x{height})"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "data length {} does not match {width}x{height}",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidInput(format!(
                "intensity {v} outside [0, 1]"
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Constant image filled with `value`.
    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel; results are clamped to `[0, 1]`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y).clamp(0.0, 1.0));
            }
        }
        Self::new(width, height, data)
    }

    /// 8-bit luminance plane, each byte divided by 255.
    pub fn from_luma8(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        Self::new(
            width,
            height,
            bytes.iter().map(|&b| f64::from(b) / 255.0).collect(),
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    /// Row-major 8-bit quantization (`round(v * 255)`).
    pub fn to_bytes(&self) -> Vec<u8> {
        self.data.iter().map(|&v| quantize8(v)).collect()
    }

    /// Intensity inversion `v -> 1 - v`.
    pub fn inverted(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|v| 1.0 - v).collect(),
        }
    }

    /// Loads a PNG or JPEG file, compositing alpha over white and converting to luminance.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let decode_err = |message: String| Error::Decode {
            path: path.to_path_buf(),
            message,
        };
        let reader = ImageReader::open(path)
            .map_err(|e| Error::io(path, e))?
            .with_guessed_format()
            .map_err(|e| Error::io(path, e))?;
        let img = reader.decode().map_err(|e| decode_err(e.to_string()))?;
        Self::from_dynamic(&img)
    }

    /// Decodes an in-memory PNG or JPEG.
    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let img = image::load_from_memory(bytes).map_err(|e| Error::Decode {
            path: "<memory>".into(),
            message: e.to_string(),
        })?;
        Self::from_dynamic(&img)
    }

    pub fn from_dynamic(img: &DynamicImage) -> Result<Self> {
        let (w, h) = (img.width() as usize, img.height() as usize);
        let color = img.color();
        let eight_bit = color.bytes_per_pixel() / color.channel_count() == 1;
        let over_white = |c: f64, a: f64| (c.clamp(0.0, 1.0) * a + (1.0 - a)).clamp(0.0, 1.0);
        match (color.has_color(), eight_bit) {
            (false, true) => {
                let la = img.to_luma_alpha8();
                let data = la
                    .pixels()
                    .map(|p| over_white(f64::from(p[0]) / 255.0, f64::from(p[1]) / 255.0))
                    .collect();
                Self::new(w, h, data)
            }
            (false, false) => {
                let la = img.to_luma_alpha32f();
                let data = la
                    .pixels()
                    .map(|p| over_white(f64::from(p[0]), f64::from(p[1])))
                    .collect();
                Self::new(w, h, data)
            }
            (true, true) => {
                let rgba = img.to_rgba8();
                let pixels = rgba
                    .pixels()
                    .map(|p| {
                        let a = f64::from(p[3]) / 255.0;
                        [0, 1, 2].map(|i| over_white(f64::from(p[i]) / 255.0, a))
                    })
                    .collect();
                to_grayscale(&RgbImage::new(w, h, pixels)?)
            }
            (true, false) => {
                let rgba = img.to_rgba32f();
                let pixels = rgba
                    .pixels()
                    .map(|p| {
                        let a = f64::from(p[3]).clamp(0.0, 1.0);
                        [0, 1, 2].map(|i| over_white(f64::from(p[i]), a))
                    })
                    .collect();
                to_grayscale(&RgbImage::new(w, h, pixels)?)
            }
        }
    }

    /// Writes the image as an 8-bit grayscale PNG.
    pub fn save_png(&self, path: impl AsRef<Path>) -> Result<()> {
        save_luma8(path.as_ref(), self.width, self.height, self.to_bytes())
    }
}

#[inline]
pub(crate) fn quantize8(v: f64) -> u8 {
    (v * 255.0).round().clamp(0.0, 255.0) as u8
}

fn save_luma8(path: &Path, width: usize, height: usize, bytes: Vec<u8>) -> Result<()> {
    let buf = image::GrayImage::from_raw(width as u32, height as u32, bytes)
        .ok_or_else(|| Error::InvalidInput("raster buffer size mismatch".into()))?;
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| match e {
            image::ImageError::IoError(io) => Error::io(path, io),
            other => Error::InvalidInput(other.to_string()),
        })
}

/// Color raster with channels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<[f64; 3]>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<[f64; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput(format!(
                "zero-dimension raster ({width}x{height})"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "data length {} does not match {width}x{height}",
                data.len()
            )));
        }
        if data.iter().flatten().any(|c| !(0.0..=1.0).contains(c)) {
            return Err(Error::InvalidInput("channel value outside [0, 1]".into()));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Replicates a grayscale image into three equal channels.
    pub fn from_gray(img: &GrayImage) -> Self {
        Self {
            width: img.width,
            height: img.height,
            data: img.data.iter().map(|&v| [v, v, v]).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.data
    }
}

/// Per-pixel Rec. 709 luminance. Pixels with equal channels pass through unchanged.
pub fn to_grayscale(img: &RgbImage) -> Result<GrayImage> {
    let data = img
        .data
        .iter()
        .map(|&[r, g, b]| {
            if r == g && g == b {
                r
            } else {
                (LUMA_WEIGHTS[0] * r + LUMA_WEIGHTS[1] * g + LUMA_WEIGHTS[2] * b).clamp(0.0, 1.0)
            }
        })
        .collect();
    GrayImage::new(img.width, img.height, data)
}

/// Two-valued raster (`true` = foreground).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "binary raster {width}x{height} with {} pixels",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    pub fn count_foreground(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    /// Foreground as white (1.0), background as black (0.0).
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        }
    }
}

/// Level assigned by coarse-graining.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    White,
    Grey,
    Black,
}

impl Level {
    /// Byte used when serializing a three-level image.
    pub fn byte(self) -> u8 {
        match self {
            Level::White => 255,
            Level::Grey => 128,
            Level::Black => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriLevelImage {
    width: usize,
    height: usize,
    data: Vec<Level>,
}

impl TriLevelImage {
    pub(crate) fn from_parts(width: usize, height: usize, data: Vec<Level>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[Level] {
        &self.data
    }

    pub fn count(&self, level: Level) -> usize {
        self.data.iter().filter(|&&l| l == level).count()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.data.iter().map(|l| l.byte()).collect()
    }

    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|l| f64::from(l.byte()) / 255.0).collect(),
        }
    }
}

/// Uniform-bin luminance histogram over `[0, 1]`; the last bin is right-closed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: Vec<u64>,
    total: u64,
}

impl Histogram {
    pub fn bin_count(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn occupied_bins(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Probabilities of the non-empty bins.
    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        let total = self.total as f64;
        self.counts
            .iter()
            .filter(|&&c| c > 0)
            .map(move |&c| c as f64 / total)
    }
}

#[inline]
pub fn bin_index(v: f64, bins: usize) -> usize {
    ((v * bins as f64).floor() as usize).min(bins - 1)
}

pub fn histogram(img: &GrayImage, bins: usize) -> Result<Histogram> {
    if bins < 2 {
        return Err(Error::InvalidParameter(format!(
            "histogram needs at least 2 bins, got {bins}"
        )));
    }
    let mut counts = vec![0u64; bins];
    for &v in &img.data {
        counts[bin_index(v, bins)] += 1;
    }
    Ok(Histogram {
        counts,
        total: img.data.len() as u64,
    })
}
