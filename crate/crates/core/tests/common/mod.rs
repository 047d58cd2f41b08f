//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use artcomplexity::geometry::{Layer, LayeredForm, Polyline};
use artcomplexity::{BinaryImage, GrayImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_image(seed: u64, w: usize, h: usize) -> GrayImage {
    let mut r = rng(seed);
    GrayImage::from_fn(w, h, |_, _| r.random_range(0..=255u8) as f64 / 255.0).unwrap()
}

/// Random image quantized to `k/255`, with a random number of distinct levels.
pub fn random_levels_image(seed: u64, w: usize, h: usize) -> GrayImage {
    let mut r = rng(seed);
    let levels: Vec<u8> = (0..r.random_range(2..12)).map(|_| r.random()).collect();
    GrayImage::from_fn(w, h, |_, _| levels[r.random_range(0..levels.len())] as f64 / 255.0).unwrap()
}

pub fn gradient(w: usize, h: usize) -> GrayImage {
    GrayImage::from_fn(w, h, |x, y| (x + y) as f64 / (w + h - 2) as f64).unwrap()
}

/// Dark disk on white.
pub fn disk(size: usize, radius: f64) -> GrayImage {
    let c = (size as f64 - 1.0) / 2.0;
    GrayImage::from_fn(size, size, |x, y| {
        let d = ((x as f64 - c).powi(2) + (y as f64 - c).powi(2)).sqrt();
        if d <= radius {
            0.0
        } else {
            1.0
        }
    })
    .unwrap()
}

/// Bright ring on a dark background.
pub fn annulus(size: usize, inner: f64, outer: f64) -> GrayImage {
    let c = (size as f64 - 1.0) / 2.0;
    GrayImage::from_fn(size, size, |x, y| {
        let d = ((x as f64 - c).powi(2) + (y as f64 - c).powi(2)).sqrt();
        if d >= inner && d <= outer {
            0.95
        } else {
            0.05
        }
    })
    .unwrap()
}

/// Level-`levels` Sierpinski carpet on a `3^levels` square; `true` = filled.
pub fn sierpinski_carpet(levels: u32) -> BinaryImage {
    let n = 3usize.pow(levels);
    BinaryImage::from_fn(n, n, |mut x, mut y| {
        while x > 0 || y > 0 {
            if x % 3 == 1 && y % 3 == 1 {
                return false;
            }
            x /= 3;
            y /= 3;
        }
        true
    })
    .unwrap()
}

/// Smooth blobs plus texture: the kind of image the codec tests sweep over.
pub fn textured(seed: u64, w: usize, h: usize) -> GrayImage {
    let mut r = rng(seed);
    let (fx, fy, amp): (f64, f64, f64) = (r.random_range(0.02..0.3), r.random_range(0.02..0.3), r.random_range(0.0..0.4));
    GrayImage::from_fn(w, h, |x, y| {
        let base = 0.5 + 0.3 * (x as f64 * fx).sin() * (y as f64 * fy).cos();
        base + amp * (r.random::<f64>() - 0.5)
    })
    .unwrap()
}

pub fn regular_polygon(n: usize, radius: f64, phase: f64) -> Polyline {
    Polyline::new(
        (0..n)
            .map(|i| {
                let a = phase + std::f64::consts::TAU * i as f64 / n as f64;
                [radius * a.cos(), radius * a.sin()]
            })
            .collect(),
    )
    .unwrap()
}

/// Plus sign made of five unit squares (area 5, hull area 7).
pub fn unit_cross() -> Polyline {
    Polyline::new(vec![
        [1.0, 0.0],
        [2.0, 0.0],
        [2.0, 1.0],
        [3.0, 1.0],
        [3.0, 2.0],
        [2.0, 2.0],
        [2.0, 3.0],
        [1.0, 3.0],
        [1.0, 2.0],
        [0.0, 2.0],
        [0.0, 1.0],
        [1.0, 1.0],
    ])
    .unwrap()
}

pub fn regular_stack(layers: usize) -> LayeredForm {
    LayeredForm::new(
        (0..layers)
            .map(|i| Layer::new(vec![regular_polygon(6 + i, 1.0 + i as f64, 0.1 * i as f64)]).unwrap())
            .collect(),
    )
    .unwrap()
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reconstruction as little-endian f64 bit patterns.
pub fn recon_bytes(img: &GrayImage) -> Vec<u8> {
    img.data().iter().flat_map(|v| v.to_bits().to_le_bytes()).collect()
}

/// Integer-only 75x61 fixture so the codec input is platform independent.
pub fn digest_fixture() -> GrayImage {
    let (w, h) = (75, 61);
    let mut x = 0x9E37_79B9u32;
    let bytes: Vec<u8> = (0..w * h)
        .map(|i| {
            x ^= x << 13;
            x ^= x >> 17;
            x ^= x << 5;
            let (px, py) = (i % w, i / w);
            let smooth = ((px * 3 + py * 2) % 256) as u32;
            ((smooth + (x >> 28)) % 256) as u8
        })
        .collect();
    GrayImage::from_luma8(w, h, &bytes).unwrap()
}

pub const FROZEN_CODEC_VERSION: &str = "lzw-msb-9to12/1+bdct-rle-lzw/1";
/// LZW output length and SHA-256 for `digest_fixture`.
pub const FROZEN_LZW: (usize, &str) = (5190, "c34e9b9d7b45888a7054777df98d118c67d97b5f71fc595798bee273ca6f8c65");
/// (quality, encoded size, SHA-256 of the reconstruction bits) for `digest_fixture`.
pub const FROZEN_LOSSY: &[(f64, usize, &str)] = &[
    (0.3, 541, "028f471a4b82a7d5675656829d73579c2077f87631ed09524140a9587ec4d530"),
    (0.75, 1237, "cee7effa72dc30ef3c2dee8eb92703933103fffeb536955fd334bd95853c8df8"),
];

/// Writes `n` PNGs whose noise amplitude rises with an integer score 1..=10,
/// one zero-scored (excluded) image and one corrupt file, plus a manifest.
/// Returns the manifest path.
pub fn write_corpus(dir: &std::path::Path, n: usize) -> std::path::PathBuf {
    let mut manifest = String::from("path,score,category\n");
    for i in 0..n {
        let score = 1 + i % 10;
        let mut r = rng(i as u64);
        let amp = score as f64 / 12.0;
        let img = GrayImage::from_fn(64, 64, |x, y| {
            let base = 0.5 + 0.3 * ((x as f64) * 0.15).sin() * ((y as f64) * 0.1).cos();
            base + amp * (r.random::<f64>() - 0.5)
        })
        .unwrap();
        let name = format!("img_{i:03}.png");
        img.save_png(dir.join(&name)).unwrap();
        manifest.push_str(&format!("{name},{score},{}\n", if i % 2 == 0 { "even" } else { "odd" }));
    }
    gradient(64, 64).save_png(dir.join("unrated.png")).unwrap();
    manifest.push_str("unrated.png,0,\n");
    std::fs::write(dir.join("broken.png"), b"not a png").unwrap();
    manifest.push_str("broken.png,5,\n");
    let path = dir.join("manifest.csv");
    std::fs::write(&path, manifest).unwrap();
    path
}

// brute-force oracles

fn byte_bin(v: f64) -> usize {
    // pixel values are k/255; 256 equal-width bins over [0, 1]
    ((v * 256.0).floor() as usize).min(255)
}

/// Entropy and energy by summing over pixels: each pixel contributes
/// `-ln p(bin)` and `p(bin)`, where `p(bin)` comes from a pairwise count.
pub fn brute_entropy_energy(img: &GrayImage) -> (f64, f64) {
    let d = img.data();
    let n = d.len() as f64;
    let (mut s, mut e) = (0.0, 0.0);
    for &v in d {
        let same = d.iter().filter(|&&u| byte_bin(u) == byte_bin(v)).count() as f64;
        let p = same / n;
        s -= p.ln() / n;
        e += p / n;
    }
    (s, e)
}

pub fn brute_skew(img: &GrayImage) -> f64 {
    let d = img.data();
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    let sd = (d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    d.iter().map(|v| ((v - mean) / sd).powi(3)).sum::<f64>() / n
}

fn bits(v: Option<f64>) -> Option<u64> {
    v.map(f64::to_bits)
}

/// Compares `measure_all` with each measure's own entry point, bit for bit.
pub fn check_against_individual_calls(img: &GrayImage) -> Result<(), String> {
    use artcomplexity::measures::*;
    let c = artcomplexity::MeasureConfig::default();
    let v = measure_all(img, &c).map_err(|e| e.to_string())?;
    let ok = |r: Result<f64, artcomplexity::Error>| r.ok();
    let dim = fractal_dimension(img, c.adaptive).ok().map(|b| b.dimension);
    let pairs: [(&str, Option<u64>, Option<u64>); 9] = [
        ("S", bits(v.entropy), bits(Some(entropy(img)))),
        ("E", bits(v.energy), bits(Some(energy(img)))),
        ("C_a", bits(v.algorithmic), bits(Some(algorithmic_complexity(img)))),
        ("C_s", bits(v.structural), bits(ok(structural_complexity(img, &c.structural)))),
        ("C_mc", bits(v.mc), bits(ok(mc_complexity(img, c.lossy)))),
        ("C_mc_E", bits(v.mc_edges), bits(ok(mc_complexity_edges(img, c.lossy)))),
        ("D", bits(v.fractal_dimension), bits(dim)),
        ("D_a", bits(v.fractal_aesthetic), bits(ok(fractal_aesthetic(img, c.fractal_aesthetic, c.adaptive)))),
        ("skew", bits(v.skew), bits(ok(skew(img)))),
    ];
    for (name, a, b) in pairs {
        if a != b {
            return Err(format!("{name}: {a:?} vs {b:?}"));
        }
    }
    if v.contours != Some(contours(img)) || v.euler != Some(euler(img)) {
        return Err("topology differs".into());
    }
    Ok(())
}
