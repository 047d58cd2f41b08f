//! Physical complexity of layered forms: per-layer convexity deviation and the
//! quartile coefficient of dispersion of turn angles, averaged over layers.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Closed polyline. A repeated first vertex at the end is dropped on construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polyline {
    vertices: Vec<Point>,
}

impl Polyline {
    pub fn new(mut vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "polyline needs at least 3 distinct vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite vertex coordinate".into()));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Unsigned shoelace area.
    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        let twice: f64 = (0..n)
            .map(|i| {
                let [x0, y0] = self.vertices[i];
                let [x1, y1] = self.vertices[(i + 1) % n];
                x0 * y1 - x1 * y0
            })
            .sum();
        (twice / 2.0).abs()
    }

    /// Absolute turn angles in degrees at each vertex, skipping zero-length edges.
    pub fn turn_angles(&self) -> Vec<f64> {
        let mut pts: Vec<Point> = Vec::with_capacity(self.vertices.len());
        for &p in &self.vertices {
            if pts.last() != Some(&p) {
                pts.push(p);
            }
        }
        while pts.len() > 1 && pts.first() == pts.last() {
            pts.pop();
        }
        let n = pts.len();
        if n < 3 {
            return Vec::new();
        }
        (0..n)
            .map(|i| {
                let prev = pts[(i + n - 1) % n];
                let cur = pts[i];
                let next = pts[(i + 1) % n];
                let a = [cur[0] - prev[0], cur[1] - prev[1]];
                let b = [next[0] - cur[0], next[1] - cur[1]];
                let cross = a[0] * b[1] - a[1] * b[0];
                let dot = a[0] * b[0] + a[1] * b[1];
                cross.abs().atan2(dot).to_degrees()
            })
            .collect()
    }

    /// True when no two non-adjacent edges intersect. Quadratic in vertex count.
    pub fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        let edge = |i: usize| (self.vertices[i], self.vertices[(i + 1) % n]);
        for i in 0..n {
            for j in i + 1..n {
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (a, b) = edge(i);
                let (c, d) = edge(j);
                if segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0)) && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0)) {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

/// One z-slice: one or more closed polylines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Layer {
    polylines: Vec<Polyline>,
}

impl Layer {
    pub fn new(polylines: Vec<Polyline>) -> Result<Self> {
        if polylines.is_empty() {
            return Err(Error::InvalidInput("layer has no polylines".into()));
        }
        Ok(Self { polylines })
    }

    pub fn polylines(&self) -> &[Polyline] {
        &self.polylines
    }

    fn vertices(&self) -> impl Iterator<Item = Point> + '_ {
        self.polylines.iter().flat_map(|p| p.vertices().iter().copied())
    }

    fn edge_count(&self) -> usize {
        self.polylines.iter().map(|p| p.vertices().len()).sum()
    }
}

/// Ordered stack of layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayeredForm {
    layers: Vec<Layer>,
}

impl LayeredForm {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidInput("form has no layers".into()));
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Applies `f` to every vertex.
    pub fn map_vertices(&self, f: impl Fn(Point) -> Point) -> Result<Self> {
        let layers = self
            .layers
            .iter()
            .map(|l| {
                Layer::new(
                    l.polylines
                        .iter()
                        .map(|p| Polyline::new(p.vertices.iter().map(|&v| f(v)).collect()))
                        .collect::<Result<_>>()?,
                )
            })
            .collect::<Result<_>>()?;
        Self::new(layers)
    }

    /// Parses the line-based text format: one polyline per line as whitespace
    /// separated `x y` pairs, layers separated by blank lines, `#` comments.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut layers = Vec::new();
        let mut current = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                if !current.is_empty() {
                    layers.push(Layer::new(std::mem::take(&mut current))?);
                }
                continue;
            }
            let nums = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("line {}: bad number '{t}'", lineno + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            if nums.len() % 2 != 0 {
                return Err(Error::Parse(format!(
                    "line {}: odd number of coordinates",
                    lineno + 1
                )));
            }
            let pts = nums.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
            current.push(
                Polyline::new(pts).map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?,
            );
        }
        if !current.is_empty() {
            layers.push(Layer::new(current)?);
        }
        Self::new(layers)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, layer) in self.layers.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            for p in &layer.polylines {
                let coords: Vec<String> = p.vertices.iter().map(|[x, y]| format!("{x} {y}")).collect();
                out.push_str(&coords.join(" "));
                out.push('\n');
            }
        }
        out
    }

    /// JSON form: `{"layers": [[[[x, y], ...], ...], ...]}`.
    pub fn parse_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            layers: Vec<Vec<Vec<Point>>>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let layers = raw
            .layers
            .into_iter()
            .map(|l| Layer::new(l.into_iter().map(Polyline::new).collect::<Result<_>>()?))
            .collect::<Result<_>>()?;
        Self::new(layers)
    }

    /// Loads a form, choosing JSON for `.json` files and the text format otherwise.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            Self::parse_json(&text)
        } else {
            Self::parse_text(&text)
        }
    }
}

/// Andrew's monotone chain. Returns the hull counter-clockwise without collinear points.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && orient(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && orient(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn polygon_area(pts: &[Point]) -> f64 {
    if pts.len() < 3 {
        return 0.0;
    }
    let n = pts.len();
    let twice: f64 = (0..n)
        .map(|i| pts[i][0] * pts[(i + 1) % n][1] - pts[(i + 1) % n][0] * pts[i][1])
        .sum();
    (twice / 2.0).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexityDeviation {
    pub value: f64,
    /// Set when the hull has zero area (collinear vertices).
    pub degenerate: bool,
}

/// `1 - Σ polygon areas / hull area`, clamped at 0.
pub fn layer_convexity_deviation(layer: &Layer) -> ConvexityDeviation {
    let points: Vec<Point> = layer.vertices().collect();
    let hull_area = polygon_area(&convex_hull(&points));
    let scale = points
        .iter()
        .flatten()
        .fold(0.0f64, |m, c| m.max(c.abs()))
        .max(f64::MIN_POSITIVE);
    if hull_area <= 1e-12 * scale * scale {
        return ConvexityDeviation {
            value: 0.0,
            degenerate: true,
        };
    }
    let area: f64 = layer.polylines.iter().map(Polyline::area).sum();
    ConvexityDeviation {
        value: (1.0 - area / hull_area).max(0.0),
        degenerate: false,
    }
}

/// Linear-interpolation quantile of sorted data (`(n - 1)·q` positioning).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `(Q3 - Q1) / (Q3 + Q1)`.
pub fn quartile_coefficient_of_dispersion(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Undefined("quartiles of an empty sample".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25);
    let q3 = quantile_sorted(&sorted, 0.75);
    if q1 + q3 == 0.0 {
        return Err(Error::Undefined("Q1 + Q3 = 0".into()));
    }
    Ok((q3 - q1) / (q3 + q1))
}

/// Angle dispersion of one layer. Needs at least four edges.
pub fn layer_angle_qcd(layer: &Layer) -> Result<f64> {
    if layer.edge_count() < 4 {
        return Err(Error::Undefined(format!(
            "layer has {} edges, need at least 4",
            layer.edge_count()
        )));
    }
    let angles: Vec<f64> = layer.polylines.iter().flat_map(Polyline::turn_angles).collect();
    quartile_coefficient_of_dispersion(&angles)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerScore {
    pub convexity: ConvexityDeviation,
    pub qcd: Option<f64>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhysicalComplexity {
    pub score: f64,
    pub layers: Vec<LayerScore>,
    pub flags: Vec<String>,
}

/// Mean over layers of `(convexity deviation + angle QCD) / 2`. Layers without a
/// defined QCD contribute their convexity deviation alone.
pub fn physical_complexity(form: &LayeredForm) -> PhysicalComplexity {
    let mut flags = Vec::new();
    let layers: Vec<LayerScore> = form
        .layers
        .iter()
        .enumerate()
        .map(|(i, layer)| {
            let convexity = layer_convexity_deviation(layer);
            if convexity.degenerate {
                flags.push(format!("layer {i}: degenerate hull"));
            }
            let qcd = match layer_angle_qcd(layer) {
                Ok(q) => Some(q),
                Err(e) => {
                    flags.push(format!("layer {i}: QCD missing ({e})"));
                    None
                }
            };
            let score = match qcd {
                Some(q) => (convexity.value + q) / 2.0,
                None => convexity.value,
            };
            LayerScore { convexity, qcd, score }
        })
        .collect();
    let score = layers.iter().map(|l| l.score).sum::<f64>() / layers.len() as f64;
    PhysicalComplexity { score, layers, flags }
}
