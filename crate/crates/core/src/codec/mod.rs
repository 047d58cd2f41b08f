//! Compression primitives behind the algorithmic measures.

pub mod lossy;
pub mod lzw;

pub use lossy::{
    lossy_encode, rms_error, BlockDctCodec, LossyCodec, LossyCodecParams, LossyEncoding, BLOCK_DCT_VERSION,
};
pub use lzw::{compress as lzw_compress, decompress as lzw_decompress};

/// Version tag covering both codecs; stored with cached measurements.
pub const CODEC_VERSION: &str = "lzw-msb-9to12/1+bdct-rle-lzw/1";
