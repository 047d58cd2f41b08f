//! 8×8 block-DCT lossy codec for the luminance plane.
//!
//! Quantization follows the usual baseline luminance table scaled by the
//! quality factor. The entropy stage is DC differencing, zig-zag run-length
//! coding of the AC terms and LZW over the resulting byte stream. The stream is
//! not interchange compatible; only its length and the reconstruction matter.
//! Reconstructed samples are rounded to 8 bits.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::lzw;
use crate::error::{Error, Result};
use crate::image::GrayImage;

pub const BLOCK: usize = 8;

/// Baseline luminance quantization table (natural row-major order).
pub const BASE_LUMA_TABLE: [u16; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, //
    12, 12, 14, 19, 26, 58, 60, 55, //
    14, 13, 16, 24, 40, 57, 69, 56, //
    14, 17, 22, 29, 51, 87, 80, 62, //
    18, 22, 37, 56, 68, 109, 103, 77, //
    24, 35, 55, 64, 81, 104, 113, 92, //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99,
];

/// Zig-zag scan order: `ZIGZAG[i]` is the natural index of the i-th scanned coefficient.
pub const ZIGZAG: [usize; 64] = [
    0, 1, 8, 16, 9, 2, 3, 10, //
    17, 24, 32, 25, 18, 11, 4, 5, //
    12, 19, 26, 33, 40, 48, 41, 34, //
    27, 20, 13, 6, 7, 14, 21, 28, //
    35, 42, 49, 56, 57, 50, 43, 36, //
    29, 22, 15, 23, 30, 37, 44, 51, //
    58, 59, 52, 45, 38, 31, 39, 46, //
    53, 60, 61, 54, 47, 55, 62, 63,
];

const END_OF_BLOCK: u8 = 0xFF;

/// Quality in `(0, 1]`; lower means coarser quantization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossyCodecParams {
    pub quality: f64,
}

impl LossyCodecParams {
    pub fn new(quality: f64) -> Result<Self> {
        let p = Self { quality };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.quality > 0.0 && self.quality <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "quality must lie in (0, 1], got {}",
                self.quality
            )));
        }
        Ok(())
    }

    /// Integer quality on the 1..=100 scale.
    pub fn quality_percent(&self) -> u32 {
        ((100.0 * self.quality).round() as u32).clamp(1, 100)
    }
}

impl Default for LossyCodecParams {
    fn default() -> Self {
        Self { quality: 0.75 }
    }
}

/// Output of a lossy encode: stream size in bytes and the decoded image.
#[derive(Debug, Clone, PartialEq)]
pub struct LossyEncoding {
    /// Bytes after the LZW stage; this is the size the measures use.
    pub encoded_size: usize,
    /// Bytes of the run-length stream before LZW, for diagnostics.
    pub stream_size: usize,
    pub reconstruction: GrayImage,
}

/// A lossy codec usable by the Machado–Cardoso complexity measure.
pub trait LossyCodec: Send + Sync {
    /// Identifier stored alongside cached measurements.
    fn version(&self) -> &'static str;
    fn encode(&self, img: &GrayImage, params: LossyCodecParams) -> Result<LossyEncoding>;
}

/// The in-repo block-DCT codec.
#[derive(Debug, Clone, Copy, Default)]
pub struct BlockDctCodec;

pub const BLOCK_DCT_VERSION: &str = "bdct-rle-lzw/1";

impl LossyCodec for BlockDctCodec {
    fn version(&self) -> &'static str {
        BLOCK_DCT_VERSION
    }

    fn encode(&self, img: &GrayImage, params: LossyCodecParams) -> Result<LossyEncoding> {
        lossy_encode(img, params)
    }
}

/// Quantization table for a quality setting.
pub fn quant_table(params: LossyCodecParams) -> [u16; 64] {
    let q = params.quality_percent();
    let scale = if q < 50 { 5000 / q } else { 200 - 2 * q };
    let mut table = [0u16; 64];
    for (t, &base) in table.iter_mut().zip(BASE_LUMA_TABLE.iter()) {
        let v = (f64::from(base) * f64::from(scale) / 100.0).round();
        *t = v.clamp(1.0, 255.0) as u16;
    }
    table
}

/// `cos(kπ/16)` for `k = 0..=8`, as literals so the basis does not depend on
/// the platform's `cos`.
const COS_SIXTEENTHS: [f64; 9] = [
    1.0,
    0.9807852804032304,
    0.9238795325112867,
    0.8314696123025452,
    0.7071067811865476,
    0.5555702330196023,
    0.38268343236508984,
    0.19509032201612833,
    0.0,
];

/// `cos(mπ/16)` for any integer `m` via periodicity and symmetry.
fn cos_sixteenth(m: usize) -> f64 {
    let m = m % 32;
    let m = if m > 16 { 32 - m } else { m };
    if m > 8 {
        -COS_SIXTEENTHS[16 - m]
    } else {
        COS_SIXTEENTHS[m]
    }
}

/// `cos((2x + 1) u π / 16) · c(u) / 2`, indexed `[u][x]`.
fn dct_basis() -> &'static [[f64; BLOCK]; BLOCK] {
    static BASIS: OnceLock<[[f64; BLOCK]; BLOCK]> = OnceLock::new();
    BASIS.get_or_init(|| {
        let mut b = [[0.0; BLOCK]; BLOCK];
        for (u, row) in b.iter_mut().enumerate() {
            let c = if u == 0 { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 };
            for (x, v) in row.iter_mut().enumerate() {
                *v = 0.5 * c * cos_sixteenth((2 * x + 1) * u);
            }
        }
        b
    })
}

/// Orthonormal 2-D DCT-II of one block.
pub fn forward_dct(block: &[f64; 64]) -> [f64; 64] {
    let b = dct_basis();
    let mut tmp = [0.0; 64];
    for y in 0..BLOCK {
        for u in 0..BLOCK {
            tmp[y * BLOCK + u] = (0..BLOCK).map(|x| b[u][x] * block[y * BLOCK + x]).sum();
        }
    }
    let mut out = [0.0; 64];
    for v in 0..BLOCK {
        for u in 0..BLOCK {
            out[v * BLOCK + u] = (0..BLOCK).map(|y| b[v][y] * tmp[y * BLOCK + u]).sum();
        }
    }
    out
}

/// Inverse of [`forward_dct`].
pub fn inverse_dct(coeffs: &[f64; 64]) -> [f64; 64] {
    let b = dct_basis();
    let mut tmp = [0.0; 64];
    for v in 0..BLOCK {
        for x in 0..BLOCK {
            tmp[v * BLOCK + x] = (0..BLOCK).map(|u| b[u][x] * coeffs[v * BLOCK + u]).sum();
        }
    }
    let mut out = [0.0; 64];
    for y in 0..BLOCK {
        for x in 0..BLOCK {
            out[y * BLOCK + x] = (0..BLOCK).map(|v| b[v][y] * tmp[v * BLOCK + x]).sum();
        }
    }
    out
}

fn push_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7F) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

#[inline]
fn zigzag_sign(v: i32) -> u64 {
    ((v << 1) ^ (v >> 31)) as u32 as u64
}

/// Encodes `img` and returns the stream size and the reconstruction.
pub fn lossy_encode(img: &GrayImage, params: LossyCodecParams) -> Result<LossyEncoding> {
    params.validate()?;
    let table = quant_table(params);
    let (w, h) = (img.width(), img.height());
    let blocks_x = w.div_ceil(BLOCK);
    let blocks_y = h.div_ceil(BLOCK);

    let mut stream = Vec::with_capacity(w * h / 4 + 16);
    stream.extend_from_slice(&(w as u32).to_be_bytes());
    stream.extend_from_slice(&(h as u32).to_be_bytes());
    stream.push(params.quality_percent() as u8);

    let mut recon = vec![0.0; w * h];
    let mut previous_dc = 0i32;
    let mut block = [0.0; 64];
    for by in 0..blocks_y {
        for bx in 0..blocks_x {
            for y in 0..BLOCK {
                let sy = (by * BLOCK + y).min(h - 1);
                for x in 0..BLOCK {
                    let sx = (bx * BLOCK + x).min(w - 1);
                    block[y * BLOCK + x] = img.get(sx, sy) * 255.0 - 128.0;
                }
            }
            let coeffs = forward_dct(&block);
            let mut quantized = [0i32; 64];
            for i in 0..64 {
                quantized[i] = (coeffs[i] / f64::from(table[i])).round() as i32;
            }

            push_varint(&mut stream, zigzag_sign(quantized[0] - previous_dc));
            previous_dc = quantized[0];
            let mut run = 0u8;
            for &natural in &ZIGZAG[1..] {
                let q = quantized[natural];
                if q == 0 {
                    run += 1;
                } else {
                    stream.push(run);
                    push_varint(&mut stream, zigzag_sign(q));
                    run = 0;
                }
            }
            stream.push(END_OF_BLOCK);

            let mut dequantized = [0.0; 64];
            for i in 0..64 {
                dequantized[i] = f64::from(quantized[i]) * f64::from(table[i]);
            }
            let pixels = inverse_dct(&dequantized);
            for y in 0..BLOCK {
                let py = by * BLOCK + y;
                if py >= h {
                    break;
                }
                for x in 0..BLOCK {
                    let px = bx * BLOCK + x;
                    if px >= w {
                        break;
                    }
                    // decoded samples are 8-bit, as a real decoder would emit
                    recon[py * w + px] = (pixels[y * BLOCK + x] + 128.0).round().clamp(0.0, 255.0) / 255.0;
                }
            }
        }
    }

    let encoded_size = lzw::compress(&stream).len();
    Ok(LossyEncoding {
        encoded_size,
        stream_size: stream.len(),
        reconstruction: GrayImage::new(w, h, recon)?,
    })
}

/// Root-mean-squared per-pixel difference of two equally sized images.
pub fn rms_error(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::InvalidInput(format!(
            "size mismatch: {}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    let sum: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok((sum / a.len() as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_cosines_match_libm() {
        for m in 0..64 {
            let exact = (m as f64 * std::f64::consts::PI / 16.0).cos();
            assert!((cos_sixteenth(m) - exact).abs() < 1e-14, "m = {m}");
        }
    }

    #[test]
    fn quality_mapping() {
        let t75 = quant_table(LossyCodecParams::new(0.75).unwrap());
        // scale = 50: 16 -> 8, 11 -> 5.5 -> 6, 121 -> 60.5 -> 61
        assert_eq!(t75[0], 8);
        assert_eq!(t75[1], 6);
        assert_eq!(t75[6 * 8 + 5], 61);
        let t100 = quant_table(LossyCodecParams::new(1.0).unwrap());
        assert!(t100.iter().all(|&v| v == 1));
        let t10 = quant_table(LossyCodecParams::new(0.1).unwrap());
        // scale = 500: 16 -> 80, 121 -> 605 -> clamp 255
        assert_eq!(t10[0], 80);
        assert_eq!(t10[6 * 8 + 5], 255);
    }

    #[test]
    fn zigzag_is_a_permutation() {
        let mut seen = [false; 64];
        for &i in &ZIGZAG {
            assert!(!seen[i]);
            seen[i] = true;
        }
    }

    #[test]
    fn dct_round_trip() {
        let mut block = [0.0; 64];
        for (i, v) in block.iter_mut().enumerate() {
            *v = ((i * 37) % 255) as f64 - 128.0;
        }
        let back = inverse_dct(&forward_dct(&block));
        for (a, b) in block.iter().zip(back.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn dct_of_constant_block_is_dc_only() {
        let c = forward_dct(&[10.0; 64]);
        assert!((c[0] - 80.0).abs() < 1e-9);
        assert!(c[1..].iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn constant_image_reconstructs_closely() {
        let img = GrayImage::filled(33, 17, 0.4).unwrap();
        let enc = lossy_encode(&img, LossyCodecParams::default()).unwrap();
        assert!(rms_error(&img, &enc.reconstruction).unwrap() < 2.0 / 255.0);
        // 15 blocks, two bytes each plus a 9-byte header, before LZW
        assert!(enc.encoded_size < 60, "{}", enc.encoded_size);
    }

    #[test]
    fn edge_padding_excluded_from_reconstruction() {
        let img = GrayImage::from_fn(11, 5, |x, y| (x * y) as f64 / 40.0).unwrap();
        let enc = lossy_encode(&img, LossyCodecParams::new(1.0).unwrap()).unwrap();
        assert_eq!(enc.reconstruction.width(), 11);
        assert_eq!(enc.reconstruction.height(), 5);
        assert!(rms_error(&img, &enc.reconstruction).unwrap() < 1.0 / 255.0);
    }

    #[test]
    fn invalid_quality() {
        assert!(LossyCodecParams::new(0.0).is_err());
        assert!(LossyCodecParams::new(1.01).is_err());
        assert!(LossyCodecParams::new(f64::NAN).is_err());
    }
}
