//! Image transformations the measures depend on.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{histogram, BinaryImage, GrayImage, Histogram, Level, TriLevelImage, DEFAULT_BINS};

/// Local adaptive binarization window: `(2r + 1)²` pixels centred on each pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdaptiveBinarizationParams {
    pub radius: usize,
}

impl AdaptiveBinarizationParams {
    pub fn new(radius: usize) -> Result<Self> {
        let p = Self { radius };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.radius < 1 {
            return Err(Error::InvalidParameter(
                "adaptive binarization radius must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

impl Default for AdaptiveBinarizationParams {
    fn default() -> Self {
        Self { radius: 2 }
    }
}

/// What the coarse-grained value η measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EtaOrientation {
    /// η = local mean of `1 - intensity` (dark ink gives high η).
    #[default]
    Darkness,
    /// η = local mean of intensity.
    Brightness,
}

/// Coarse-graining radius and trinarization threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructuralParams {
    pub radius: usize,
    pub delta: f64,
    #[serde(default)]
    pub orientation: EtaOrientation,
}

impl StructuralParams {
    pub fn new(radius: usize, delta: f64) -> Result<Self> {
        let p = Self {
            radius,
            delta,
            orientation: EtaOrientation::Darkness,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.radius < 1 {
            return Err(Error::InvalidParameter("coarse-grain radius must be >= 1".into()));
        }
        if !(0.0..=0.5).contains(&self.delta) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in [0, 0.5], got {}",
                self.delta
            )));
        }
        Ok(())
    }
}

impl Default for StructuralParams {
    fn default() -> Self {
        Self {
            radius: 5,
            delta: 0.23,
            orientation: EtaOrientation::Darkness,
        }
    }
}

/// Summed-area table in 32.32 fixed point, so window sums of equal values are exact.
struct BoxSums {
    width: usize,
    height: usize,
    table: Vec<i64>,
    squares: Option<Vec<i128>>,
}

const FIXED_ONE: f64 = (1u64 << 32) as f64;

#[inline]
fn to_fixed(v: f64) -> i64 {
    (v * FIXED_ONE).round() as i64
}

impl BoxSums {
    fn new(img: &GrayImage, map: impl Fn(f64) -> f64, with_squares: bool) -> Self {
        let (w, h) = (img.width(), img.height());
        let stride = w + 1;
        let mut table = vec![0i64; stride * (h + 1)];
        let mut squares = with_squares.then(|| vec![0i128; stride * (h + 1)]);
        for y in 0..h {
            let mut row = 0i64;
            let mut row_sq = 0i128;
            for x in 0..w {
                let v = to_fixed(map(img.get(x, y)));
                row += v;
                table[(y + 1) * stride + x + 1] = table[y * stride + x + 1] + row;
                if let Some(sq) = squares.as_mut() {
                    row_sq += i128::from(v) * i128::from(v);
                    sq[(y + 1) * stride + x + 1] = sq[y * stride + x + 1] + row_sq;
                }
            }
        }
        Self {
            width: w,
            height: h,
            table,
            squares,
        }
    }

    /// Clamped window bounds `[x0, x1) × [y0, y1)` around `(x, y)`.
    #[inline]
    fn window(&self, x: usize, y: usize, r: usize) -> (usize, usize, usize, usize) {
        (
            x.saturating_sub(r),
            (x + r + 1).min(self.width),
            y.saturating_sub(r),
            (y + r + 1).min(self.height),
        )
    }

    /// Fixed-point sum and pixel count of the clamped window.
    #[inline]
    fn sum(&self, x: usize, y: usize, r: usize) -> (i64, i64) {
        let (x0, x1, y0, y1) = self.window(x, y, r);
        let s = self.width + 1;
        let t = &self.table;
        let sum = t[y1 * s + x1] - t[y0 * s + x1] - t[y1 * s + x0] + t[y0 * s + x0];
        (sum, ((x1 - x0) * (y1 - y0)) as i64)
    }

    fn mean(&self, x: usize, y: usize, r: usize) -> f64 {
        let (sum, n) = self.sum(x, y, r);
        sum as f64 / FIXED_ONE / n as f64
    }

    fn std(&self, x: usize, y: usize, r: usize) -> f64 {
        let Some(sq) = self.squares.as_ref() else {
            return f64::NAN;
        };
        let (x0, x1, y0, y1) = self.window(x, y, r);
        let s = self.width + 1;
        let sum_sq = sq[y1 * s + x1] - sq[y0 * s + x1] - sq[y1 * s + x0] + sq[y0 * s + x0];
        let (sum, n) = self.sum(x, y, r);
        let n = i128::from(n);
        let sum = i128::from(sum);
        // n²·var in fixed-point², exact in integers
        let scaled = n * sum_sq - sum * sum;
        let var = scaled as f64 / (FIXED_ONE * FIXED_ONE) / (n * n) as f64;
        var.max(0.0).sqrt()
    }
}

/// Result of hysteresis binarization, including the thresholds used.
#[derive(Debug, Clone, PartialEq)]
pub struct MorphologicalBinarization {
    pub image: BinaryImage,
    pub high_threshold: f64,
    pub low_threshold: f64,
    /// Set when the histogram offers no Otsu split (a single occupied bin).
    pub degenerate: bool,
}

/// Otsu threshold as an intensity value; `None` when no split separates two classes.
///
/// When several bin splits share the maximal between-class variance, the
/// midpoint of that plateau is used.
pub fn otsu_threshold(hist: &Histogram) -> Option<f64> {
    let bins = hist.bin_count();
    let counts = hist.counts();
    let total = hist.total() as f64;
    if hist.occupied_bins() < 2 {
        return None;
    }
    let weighted_total: f64 = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| i as f64 * c as f64)
        .sum();

    let mut best = f64::NEG_INFINITY;
    let mut first = 0usize;
    let mut last = 0usize;
    let mut w0 = 0.0;
    let mut sum0 = 0.0;
    for k in 0..bins - 1 {
        w0 += counts[k] as f64;
        sum0 += k as f64 * counts[k] as f64;
        let w1 = total - w0;
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let m0 = sum0 / w0;
        let m1 = (weighted_total - sum0) / w1;
        let between = w0 * w1 * (m0 - m1) * (m0 - m1);
        let tol = 1e-12 * best.abs().max(between.abs());
        if best == f64::NEG_INFINITY || between > best + tol {
            best = between;
            first = k;
            last = k;
        } else if (between - best).abs() <= tol {
            last = k;
        }
    }
    if !best.is_finite() || best <= 0.0 {
        return None;
    }
    // Class 0 is bins 0..=k, so the threshold is the upper edge of bin k.
    let k = (first + last) as f64 / 2.0;
    Some((k + 1.0) / bins as f64)
}

/// Hysteresis binarization over Otsu: strong pixels are `>= t_hi`, weak pixels
/// `>= t_hi / 2` are kept when 8-connected to a strong pixel.
pub fn morphological_binarize(img: &GrayImage) -> MorphologicalBinarization {
    let hist = histogram(img, DEFAULT_BINS).expect("default bin count is valid");
    morphological_binarize_with(img, &hist)
}

pub(crate) fn morphological_binarize_with(img: &GrayImage, hist: &Histogram) -> MorphologicalBinarization {
    let (w, h) = (img.width(), img.height());
    let Some(t_hi) = otsu_threshold(hist) else {
        return MorphologicalBinarization {
            image: BinaryImage::new(w, h, vec![false; w * h]).expect("dimensions valid"),
            high_threshold: f64::NAN,
            low_threshold: f64::NAN,
            degenerate: true,
        };
    };
    let t_lo = 0.5 * t_hi;
    let data = img.data();
    let mut out = vec![false; w * h];
    let mut queue = VecDeque::new();
    for (i, &v) in data.iter().enumerate() {
        if v >= t_hi {
            out[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = ((i % w) as isize, (i / w) as isize);
        for dy in -1..=1isize {
            for dx in -1..=1isize {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if !out[j] && data[j] >= t_lo {
                    out[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    MorphologicalBinarization {
        image: BinaryImage::new(w, h, out).expect("dimensions valid"),
        high_threshold: t_hi,
        low_threshold: t_lo,
        degenerate: false,
    }
}

/// A pixel becomes foreground iff it is strictly greater than the mean of its
/// clamped `(2r+1)²` neighbourhood.
pub fn adaptive_binarize(img: &GrayImage, params: AdaptiveBinarizationParams) -> Result<BinaryImage> {
    params.validate()?;
    let sums = BoxSums::new(img, |v| v, false);
    let r = params.radius;
    BinaryImage::from_fn(img.width(), img.height(), |x, y| {
        let (sum, n) = sums.sum(x, y, r);
        // v > sum / n, compared exactly in fixed point
        i128::from(to_fixed(img.get(x, y))) * i128::from(n) > i128::from(sum)
    })
}

/// Local mean and standard deviation over the clamped `(2r+1)²` windows.
///
/// The binarization rule only uses the mean; the deviation is exposed for
/// inspection.
pub fn local_mean_std(img: &GrayImage, params: AdaptiveBinarizationParams) -> Result<(Vec<f64>, Vec<f64>)> {
    params.validate()?;
    let sums = BoxSums::new(img, |v| v, true);
    let r = params.radius;
    let (w, h) = (img.width(), img.height());
    let mut means = Vec::with_capacity(w * h);
    let mut stds = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            means.push(sums.mean(x, y, r));
            stds.push(sums.std(x, y, r));
        }
    }
    Ok((means, stds))
}

/// Raw Sobel gradient magnitudes with replicated borders.
pub fn sobel_magnitude(img: &GrayImage) -> Result<Vec<f64>> {
    let (w, h) = (img.width(), img.height());
    if w < 3 || h < 3 {
        return Err(Error::InvalidInput(format!(
            "sobel needs at least 3x3 pixels, got {w}x{h}"
        )));
    }
    let at = |x: isize, y: isize| {
        let cx = x.clamp(0, w as isize - 1) as usize;
        let cy = y.clamp(0, h as isize - 1) as usize;
        img.get(cx, cy)
    };
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            // differences of opposite taps first, so flat regions give exact zeros
            let gx = (at(x + 1, y - 1) - at(x - 1, y - 1))
                + 2.0 * (at(x + 1, y) - at(x - 1, y))
                + (at(x + 1, y + 1) - at(x - 1, y + 1));
            let gy = (at(x - 1, y + 1) - at(x - 1, y - 1))
                + 2.0 * (at(x, y + 1) - at(x, y - 1))
                + (at(x + 1, y + 1) - at(x + 1, y - 1));
            out.push((gx * gx + gy * gy).sqrt());
        }
    }
    Ok(out)
}

/// Sobel gradient magnitude rescaled so the maximum is 1 (an all-zero gradient stays zero).
pub fn sobel_edges(img: &GrayImage) -> Result<GrayImage> {
    let mut mag = sobel_magnitude(img)?;
    let max = mag.iter().copied().fold(0.0, f64::max);
    if max > 0.0 {
        for v in &mut mag {
            *v = (*v / max).min(1.0);
        }
    }
    GrayImage::new(img.width(), img.height(), mag)
}

/// Per-pixel coarse-grained value η: the clamped box mean of darkness (or brightness).
pub fn coarse_grain_eta(img: &GrayImage, params: &StructuralParams) -> Result<Vec<f64>> {
    params.validate()?;
    let sums = match params.orientation {
        EtaOrientation::Darkness => BoxSums::new(img, |v| 1.0 - v, false),
        EtaOrientation::Brightness => BoxSums::new(img, |v| v, false),
    };
    let (w, h) = (img.width(), img.height());
    let mut eta = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            eta.push(sums.mean(x, y, params.radius));
        }
    }
    Ok(eta)
}

/// Trinarization of a single η value.
pub fn level_for(eta: f64, delta: f64) -> Level {
    if eta <= delta {
        Level::White
    } else if eta <= 1.0 - delta {
        Level::Grey
    } else {
        Level::Black
    }
}

/// Box-filters the image and assigns each pixel one of three levels.
pub fn coarse_grain(img: &GrayImage, params: &StructuralParams) -> Result<TriLevelImage> {
    let eta = coarse_grain_eta(img, params)?;
    let levels = eta.into_iter().map(|e| level_for(e, params.delta)).collect();
    Ok(TriLevelImage::from_parts(img.width(), img.height(), levels))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(size: usize, cx: f64, cy: f64, r: f64, fg: f64, bg: f64) -> GrayImage {
        GrayImage::from_fn(size, size, |x, y| {
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            if dx * dx + dy * dy <= r * r {
                fg
            } else {
                bg
            }
        })
        .unwrap()
    }

    #[test]
    fn morph_constant_is_degenerate() {
        let m = morphological_binarize(&GrayImage::filled(10, 10, 0.4).unwrap());
        assert!(m.degenerate);
        assert_eq!(m.image.count_foreground(), 0);
    }

    #[test]
    fn morph_two_level_disk_is_exact() {
        let img = disk(32, 15.5, 15.5, 8.0, 0.9, 0.2);
        let m = morphological_binarize(&img);
        assert!(!m.degenerate);
        for (i, &v) in img.data().iter().enumerate() {
            assert_eq!(m.image.data()[i], v == 0.9);
        }
        assert!(m.low_threshold > 0.2 && m.high_threshold < 0.9);
    }

    #[test]
    fn morph_hysteresis_keeps_connected_halo_only() {
        // 16x16 dark ramp background, bright 6x6 blob, one-pixel halo ring around
        // it at 0.4, and an isolated 2x2 patch at the same 0.4 far away.
        let blob = |x: usize, y: usize| (4..10).contains(&x) && (4..10).contains(&y);
        let ring = |x: usize, y: usize| (3..11).contains(&x) && (3..11).contains(&y);
        let img = GrayImage::from_fn(16, 16, |x, y| {
            let patch = (12..14).contains(&x) && (12..14).contains(&y);
            if blob(x, y) {
                1.0
            } else if ring(x, y) || patch {
                0.4
            } else {
                0.01 * x as f64
            }
        })
        .unwrap();
        let m = morphological_binarize(&img);
        let t_hi = m.high_threshold;
        // Otsu plateau midpoint is bin 178 -> t_hi = 179 / 256 (checked with an
        // independent numpy evaluation); the halo sits at ~0.57·t_hi
        assert_eq!(t_hi, 179.0 / 256.0);
        assert!(0.4 >= 0.5 * t_hi && 0.4 < t_hi);
        // flood fill by hand: blob (36) + ring (64 - 36 = 28), patch dropped
        for y in 0..16 {
            for x in 0..16 {
                assert_eq!(m.image.get(x, y), ring(x, y), "pixel ({x},{y})");
            }
        }
    }

    #[test]
    fn morph_ignores_storage_order() {
        let img = disk(20, 9.0, 9.0, 5.0, 0.8, 0.1);
        let a = morphological_binarize(&img);
        let flipped = GrayImage::from_fn(20, 20, |x, y| img.get(19 - x, 19 - y)).unwrap();
        let b = morphological_binarize(&flipped);
        assert_eq!(a.high_threshold, b.high_threshold);
        for y in 0..20 {
            for x in 0..20 {
                assert_eq!(a.image.get(x, y), b.image.get(19 - x, 19 - y));
            }
        }
    }

    #[test]
    fn adaptive_constant_is_all_background() {
        for v in [0.0, 0.1, 0.37, 1.0] {
            let img = GrayImage::filled(13, 9, v).unwrap();
            let b = adaptive_binarize(&img, AdaptiveBinarizationParams::new(2).unwrap()).unwrap();
            assert_eq!(b.count_foreground(), 0);
        }
    }

    #[test]
    fn adaptive_ramp_row_hand_windows() {
        // windows: [0, 0.5] -> 0.25, [0, 0.5, 1] -> 0.5, [0.5, 1] -> 0.75
        let img = GrayImage::new(3, 1, vec![0.0, 0.5, 1.0]).unwrap();
        let b = adaptive_binarize(&img, AdaptiveBinarizationParams::new(1).unwrap()).unwrap();
        assert_eq!(b.data(), &[false, false, true]);
    }

    #[test]
    fn adaptive_rejects_zero_radius() {
        assert!(AdaptiveBinarizationParams::new(0).is_err());
        let img = GrayImage::filled(3, 3, 0.0).unwrap();
        assert!(adaptive_binarize(&img, AdaptiveBinarizationParams { radius: 0 }).is_err());
    }

    #[test]
    fn local_std_of_two_value_window() {
        let img = GrayImage::new(2, 1, vec![0.0, 1.0]).unwrap();
        let (m, s) = local_mean_std(&img, AdaptiveBinarizationParams::new(1).unwrap()).unwrap();
        assert_eq!(m, vec![0.5, 0.5]);
        assert!((s[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sobel_constant_is_zero() {
        let e = sobel_edges(&GrayImage::filled(8, 6, 0.7).unwrap()).unwrap();
        assert!(e.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sobel_step_edge_flanking_columns() {
        let img = GrayImage::from_fn(10, 6, |x, _| if x < 5 { 0.0 } else { 1.0 }).unwrap();
        let e = sobel_edges(&img).unwrap();
        for y in 0..6 {
            for x in 0..10 {
                let v = e.get(x, y);
                if x == 4 || x == 5 {
                    assert_eq!(v, 1.0);
                } else {
                    assert_eq!(v, 0.0, "({x},{y})");
                }
            }
        }
    }

    #[test]
    fn sobel_5x5_hand_convolution() {
        // single bright pixel at the centre of a 5x5 black field
        let img = GrayImage::from_fn(5, 5, |x, y| if x == 2 && y == 2 { 1.0 } else { 0.0 }).unwrap();
        let mag = sobel_magnitude(&img).unwrap();
        // by hand, kernels [-1 0 1; -2 0 2; -1 0 1] and its transpose:
        // (1,1): gx = 1, gy = 1 -> √2 ; (2,1): gx = 0, gy = 2 -> 2 ; (1,2): gx = 2 -> 2
        // (2,2): 0 ; outer ring: 0
        let expect = |x: usize, y: usize| -> f64 {
            match (x, y) {
                (1, 1) | (3, 1) | (1, 3) | (3, 3) => 2f64.sqrt(),
                (2, 1) | (2, 3) | (1, 2) | (3, 2) => 2.0,
                _ => 0.0,
            }
        };
        for y in 0..5 {
            for x in 0..5 {
                assert!((mag[y * 5 + x] - expect(x, y)).abs() < 1e-12, "({x},{y})");
            }
        }
        let e = sobel_edges(&img).unwrap();
        assert!((e.get(1, 1) - 2f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn sobel_rejects_tiny_image() {
        assert!(matches!(
            sobel_edges(&GrayImage::filled(2, 5, 0.0).unwrap()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn coarse_grain_extremes() {
        let p = StructuralParams::default();
        let white = coarse_grain(&GrayImage::filled(20, 20, 1.0).unwrap(), &p).unwrap();
        assert_eq!(white.count(Level::White), 400);
        let black = coarse_grain(&GrayImage::filled(20, 20, 0.0).unwrap(), &p).unwrap();
        assert_eq!(black.count(Level::Black), 400);
    }

    #[test]
    fn coarse_grain_random_dots_are_grey() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let img = GrayImage::from_fn(64, 64, |_, _| if rng.random_bool(0.5) { 1.0 } else { 0.0 }).unwrap();
        let t = coarse_grain(&img, &StructuralParams::default()).unwrap();
        assert!(t.count(Level::Grey) as f64 >= 0.99 * (64 * 64) as f64);
    }

    #[test]
    fn structural_params_validation() {
        assert!(StructuralParams::new(5, 0.6).is_err());
        assert!(StructuralParams::new(0, 0.2).is_err());
        assert!(StructuralParams::new(1, 0.5).is_ok());
    }
}
