//! Measures over the intensity distribution alone.

use crate::error::{Error, Result};
use crate::image::{histogram, GrayImage, Histogram, DEFAULT_BINS};

/// Histogram entropy in nats.
pub fn entropy(img: &GrayImage) -> f64 {
    entropy_of(&histogram(img, DEFAULT_BINS).expect("default bin count is valid"))
}

pub fn entropy_of(hist: &Histogram) -> f64 {
    let s: f64 = hist.probabilities().map(|p| -p * p.ln()).sum();
    // a single occupied bin gives -1·ln 1 = -0.0
    s.max(0.0)
}

/// Histogram energy `Σ p²`.
pub fn energy(img: &GrayImage) -> f64 {
    energy_of(&histogram(img, DEFAULT_BINS).expect("default bin count is valid"))
}

pub fn energy_of(hist: &Histogram) -> f64 {
    hist.probabilities().map(|p| p * p).sum()
}

/// Third standardized moment of the pixel intensities.
pub fn skew(img: &GrayImage) -> Result<f64> {
    let data = img.data();
    if data.iter().all(|&v| v == data[0]) {
        return Err(Error::Undefined("skew of a constant image".into()));
    }
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    let (m2, m3) = data.iter().fold((0.0, 0.0), |(m2, m3), &v| {
        let d = v - mean;
        (m2 + d * d, m3 + d * d * d)
    });
    let (m2, m3) = (m2 / n, m3 / n);
    if m2 <= 0.0 {
        return Err(Error::Undefined("skew of a constant image".into()));
    }
    Ok(m3 / m2.powf(1.5))
}
