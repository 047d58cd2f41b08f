//! Contour count and Euler number of the morphologically binarized image.
//!
//! Foreground is 8-connected and background 4-connected. The image is treated
//! as if surrounded by a one-pixel background frame, so every background
//! region other than the outer one is a hole.

use crate::image::{BinaryImage, GrayImage};
use crate::preprocess::morphological_binarize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Topology {
    pub components: u64,
    pub holes: u64,
}

impl Topology {
    /// Closed boundary curves: one per component and one per hole.
    pub fn contours(&self) -> u64 {
        self.components + self.holes
    }

    pub fn euler(&self) -> i64 {
        self.components as i64 - self.holes as i64
    }
}

fn count_components(w: usize, h: usize, member: &[bool], eight: bool) -> u64 {
    let mut seen = vec![false; w * h];
    let mut stack = Vec::new();
    let mut count = 0;
    for start in 0..w * h {
        if !member[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (x, y) = ((i % w) as isize, (i / w) as isize);
            for dy in -1..=1isize {
                for dx in -1..=1isize {
                    if (dx == 0 && dy == 0) || (!eight && dx != 0 && dy != 0) {
                        continue;
                    }
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                        continue;
                    }
                    let j = ny as usize * w + nx as usize;
                    if member[j] && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
    }
    count
}

pub fn topology_of(bin: &BinaryImage) -> Topology {
    let (w, h) = (bin.width(), bin.height());
    let components = count_components(w, h, bin.data(), true);

    let (pw, ph) = (w + 2, h + 2);
    let mut background = vec![true; pw * ph];
    for y in 0..h {
        for x in 0..w {
            background[(y + 1) * pw + x + 1] = !bin.get(x, y);
        }
    }
    let regions = count_components(pw, ph, &background, false);
    Topology {
        components,
        holes: regions - 1,
    }
}

/// Number of closed boundary curves after morphological binarization.
pub fn contours(img: &GrayImage) -> u64 {
    let m = morphological_binarize(img);
    if m.degenerate {
        return 0;
    }
    topology_of(&m.image).contours()
}

/// Components minus holes after morphological binarization.
pub fn euler(img: &GrayImage) -> i64 {
    let m = morphological_binarize(img);
    if m.degenerate {
        return 0;
    }
    topology_of(&m.image).euler()
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::image::GrayImage;

    fn inside(x: usize, y: usize, cx: f64, cy: f64, r: f64) -> bool {
        let (dx, dy) = (x as f64 - cx, y as f64 - cy);
        dx * dx + dy * dy <= r * r
    }

    pub fn disk() -> GrayImage {
        GrayImage::from_fn(40, 40, |x, y| if inside(x, y, 19.5, 19.5, 12.0) { 0.0 } else { 1.0 }).unwrap()
    }

    pub fn annulus() -> GrayImage {
        GrayImage::from_fn(40, 40, |x, y| {
            if inside(x, y, 19.5, 19.5, 14.0) && !inside(x, y, 19.5, 19.5, 6.0) {
                0.95
            } else {
                0.05
            }
        })
        .unwrap()
    }

    /// Three disks, one of which has two round holes.
    pub fn three_disks_two_holes() -> GrayImage {
        GrayImage::from_fn(100, 60, |x, y| {
            let big = inside(x, y, 25.0, 30.0, 20.0)
                && !inside(x, y, 17.0, 30.0, 5.0)
                && !inside(x, y, 33.0, 30.0, 5.0);
            let a = inside(x, y, 65.0, 15.0, 10.0);
            let b = inside(x, y, 70.0, 45.0, 10.0);
            if big || a || b {
                0.9
            } else {
                0.1
            }
        })
        .unwrap()
    }
}
