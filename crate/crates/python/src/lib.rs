//! Python bindings for the `artcomplexity` library.

use artcomplexity::codec;
use artcomplexity::config::ConfigOverrides;
use artcomplexity::geometry::{self, Layer, LayeredForm, Polyline};
use artcomplexity::measures::{self, FractalAestheticParams};
use artcomplexity::preprocess::{AdaptiveBinarizationParams, StructuralParams};
use artcomplexity::{stats, Error, Measure, MeasureConfig};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Grayscale image with intensities in [0, 1].
#[pyclass(name = "GrayImage", frozen)]
struct PyGrayImage(artcomplexity::GrayImage);

#[pymethods]
impl PyGrayImage {
    #[new]
    fn new(width: usize, height: usize, data: Vec<f64>) -> PyResult<Self> {
        artcomplexity::GrayImage::new(width, height, data).map(Self).map_err(to_py)
    }

    /// Builds an image from 8-bit samples, row-major.
    #[staticmethod]
    fn from_bytes(width: usize, height: usize, data: &[u8]) -> PyResult<Self> {
        artcomplexity::GrayImage::from_luma8(width, height, data).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        artcomplexity::GrayImage::load(path).map(Self).map_err(to_py)
    }

    #[getter]
    fn width(&self) -> usize {
        self.0.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.0.height()
    }

    fn data(&self) -> Vec<f64> {
        self.0.data().to_vec()
    }

    fn to_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.0.to_bytes())
    }

    fn save_png(&self, path: &str) -> PyResult<()> {
        self.0.save_png(path).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("GrayImage({}x{})", self.0.width(), self.0.height())
    }
}

#[pyfunction]
fn load_image(path: &str) -> PyResult<PyGrayImage> {
    PyGrayImage::load(path)
}

#[pyfunction]
fn entropy(img: &PyGrayImage) -> f64 {
    measures::entropy(&img.0)
}

#[pyfunction]
fn energy(img: &PyGrayImage) -> f64 {
    measures::energy(&img.0)
}

#[pyfunction]
fn contours(img: &PyGrayImage) -> u64 {
    measures::contours(&img.0)
}

#[pyfunction]
fn euler(img: &PyGrayImage) -> i64 {
    measures::euler(&img.0)
}

#[pyfunction]
fn skew(img: &PyGrayImage) -> PyResult<f64> {
    measures::skew(&img.0).map_err(to_py)
}

#[pyfunction]
fn algorithmic_complexity(img: &PyGrayImage) -> f64 {
    measures::algorithmic_complexity(&img.0)
}

#[pyfunction]
#[pyo3(signature = (img, rcg = 5, delta = 0.23))]
fn structural_complexity(img: &PyGrayImage, rcg: usize, delta: f64) -> PyResult<f64> {
    let params = StructuralParams::new(rcg, delta).map_err(to_py)?;
    measures::structural_complexity(&img.0, &params).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (img, quality = 0.75))]
fn mc_complexity(img: &PyGrayImage, quality: f64) -> PyResult<f64> {
    let params = codec::LossyCodecParams::new(quality).map_err(to_py)?;
    measures::mc_complexity(&img.0, params).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (img, quality = 0.75))]
fn mc_complexity_edges(img: &PyGrayImage, quality: f64) -> PyResult<f64> {
    let params = codec::LossyCodecParams::new(quality).map_err(to_py)?;
    measures::mc_complexity_edges(&img.0, params).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (img, radius = 2))]
fn fractal_dimension(img: &PyGrayImage, radius: usize) -> PyResult<f64> {
    let params = AdaptiveBinarizationParams::new(radius).map_err(to_py)?;
    measures::fractal_dimension(&img.0, params).map(|b| b.dimension).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (img, peak = 1.35, sigma = 0.2, radius = 2))]
fn fractal_aesthetic(img: &PyGrayImage, peak: f64, sigma: f64, radius: usize) -> PyResult<f64> {
    let fa = FractalAestheticParams::new(peak, sigma).map_err(to_py)?;
    let bin = AdaptiveBinarizationParams::new(radius).map_err(to_py)?;
    measures::fractal_aesthetic(&img.0, fa, bin).map_err(to_py)
}

/// All eleven measures as a dict; unavailable measures map to None and the
/// reasons are listed under "flags".
#[pyfunction]
#[pyo3(signature = (img, *, rcg = None, delta = None, fractal_radius = None, quality = None, fa_peak = None, fa_sigma = None, bins = None))]
#[allow(clippy::too_many_arguments)]
fn measure_all<'py>(
    py: Python<'py>,
    img: &PyGrayImage,
    rcg: Option<usize>,
    delta: Option<f64>,
    fractal_radius: Option<usize>,
    quality: Option<f64>,
    fa_peak: Option<f64>,
    fa_sigma: Option<f64>,
    bins: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let config: MeasureConfig = ConfigOverrides {
        rcg,
        delta,
        fractal_radius,
        quality,
        fa_peak,
        fa_sigma,
        bins,
        ..Default::default()
    }
    .resolve()
    .map_err(to_py)?
    .measures;
    let v = measures::measure_all(&img.0, &config).map_err(to_py)?;
    let out = PyDict::new(py);
    for m in Measure::ALL {
        match m {
            Measure::Contours => out.set_item(m.name(), v.contours)?,
            Measure::Euler => out.set_item(m.name(), v.euler)?,
            _ => out.set_item(m.name(), v.get(m))?,
        }
    }
    out.set_item("flags", v.flags)?;
    Ok(out)
}

#[pyfunction]
fn pearson(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    stats::pearson(&x, &y).map_err(to_py)
}

#[pyfunction]
fn p_value(r: f64, n: usize) -> PyResult<f64> {
    stats::p_value(r, n).map_err(to_py)
}

#[pyfunction]
fn lzw_compress<'py>(py: Python<'py>, data: &[u8]) -> Bound<'py, PyBytes> {
    PyBytes::new(py, &codec::lzw_compress(data))
}

#[pyfunction]
fn lzw_decompress<'py>(py: Python<'py>, data: &[u8]) -> PyResult<Bound<'py, PyBytes>> {
    Ok(PyBytes::new(py, &codec::lzw_decompress(data).map_err(to_py)?))
}

/// Physical complexity of a form given as layers of closed polylines of
/// `(x, y)` pairs.
#[pyfunction]
fn physical_complexity(layers: Vec<Vec<Vec<[f64; 2]>>>) -> PyResult<f64> {
    let layers = layers
        .into_iter()
        .map(|polys| {
            let polys = polys.into_iter().map(Polyline::new).collect::<Result<Vec<_>, _>>()?;
            Layer::new(polys)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(to_py)?;
    let form = LayeredForm::new(layers).map_err(to_py)?;
    Ok(geometry::physical_complexity(&form).score)
}

#[pymodule]
fn artcomplexity_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrayImage>()?;
    m.add("CODEC_VERSION", codec::CODEC_VERSION)?;
    m.add_function(wrap_pyfunction!(load_image, m)?)?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(energy, m)?)?;
    m.add_function(wrap_pyfunction!(contours, m)?)?;
    m.add_function(wrap_pyfunction!(euler, m)?)?;
    m.add_function(wrap_pyfunction!(skew, m)?)?;
    m.add_function(wrap_pyfunction!(algorithmic_complexity, m)?)?;
    m.add_function(wrap_pyfunction!(structural_complexity, m)?)?;
    m.add_function(wrap_pyfunction!(mc_complexity, m)?)?;
    m.add_function(wrap_pyfunction!(mc_complexity_edges, m)?)?;
    m.add_function(wrap_pyfunction!(fractal_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(fractal_aesthetic, m)?)?;
    m.add_function(wrap_pyfunction!(measure_all, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(p_value, m)?)?;
    m.add_function(wrap_pyfunction!(lzw_compress, m)?)?;
    m.add_function(wrap_pyfunction!(lzw_decompress, m)?)?;
    m.add_function(wrap_pyfunction!(physical_complexity, m)?)?;
    Ok(())
}
