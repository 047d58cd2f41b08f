//! Compression-based complexity: algorithmic, structural and Machado–Cardoso.

use crate::codec::{lzw_compress, rms_error, BlockDctCodec, LossyCodec, LossyCodecParams};
use crate::error::Result;
use crate::image::{GrayImage, TriLevelImage};
use crate::preprocess::{coarse_grain, sobel_edges, StructuralParams};

/// LZW size of `bytes` relative to one byte per pixel.
fn lzw_ratio(bytes: &[u8], pixels: usize) -> f64 {
    lzw_compress(bytes).len() as f64 / pixels as f64
}

/// LZW compression ratio of the 8-bit gray raster.
pub fn algorithmic_complexity(img: &GrayImage) -> f64 {
    lzw_ratio(&img.to_bytes(), img.len())
}

pub(crate) fn structural_from_levels(levels: &TriLevelImage) -> f64 {
    lzw_ratio(&levels.to_bytes(), levels.data().len())
}

/// Compression ratio of the coarse-grained three-level image.
pub fn structural_complexity(img: &GrayImage, params: &StructuralParams) -> Result<f64> {
    Ok(structural_from_levels(&coarse_grain(img, params)?))
}

/// `RMS(i, f(i)) · s(f(i)) / s(i)` with any lossy codec.
pub fn mc_complexity_with(codec: &dyn LossyCodec, img: &GrayImage, params: LossyCodecParams) -> Result<f64> {
    let enc = codec.encode(img, params)?;
    let rms = rms_error(img, &enc.reconstruction)?;
    Ok(rms * enc.encoded_size as f64 / img.len() as f64)
}

pub fn mc_complexity(img: &GrayImage, params: LossyCodecParams) -> Result<f64> {
    mc_complexity_with(&BlockDctCodec, img, params)
}

/// [`mc_complexity`] of the Sobel edge map.
pub fn mc_complexity_edges(img: &GrayImage, params: LossyCodecParams) -> Result<f64> {
    mc_complexity(&sobel_edges(img)?, params)
}
