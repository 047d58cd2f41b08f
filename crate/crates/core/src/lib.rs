//! Image complexity measures for generative art, with corpus ingestion and
//! correlation analysis against aesthetic scores.

pub mod cli;
pub mod codec;
pub mod config;
pub mod corpus;
pub mod error;
pub mod geometry;
pub mod image;
pub mod measures;
pub mod preprocess;
pub mod report;
pub mod stats;

pub use error::{Error, Result};
pub use image::{BinaryImage, GrayImage, Histogram, Level, RgbImage, TriLevelImage};
pub use measures::{measure_all, Measure, MeasureConfig, MeasureVector};
