//! Wyner-Ziv video pipeline on top of the Slepian-Wolf layer.

mod bands;
mod codec;
mod metrics;
mod qmatrix;
mod reconstruct;
mod si;
mod transform;
mod video;

pub use bands::{assemble_frame, band_of, extract_bands, FrameBuffer, ZIGZAG};
pub use codec::{
    band_distortion, decode_sequence, encode_sequence, frame_kind, AlphaMode, AnyCode, BandData, BandDistortion,
    CodecConfig, CodecKind, DecodedBand, DecodedSequence, FrameKind, FrameReport, KeyFrameData, WzFrameData, WzStream,
    FRAME_RATE,
};
pub use metrics::{bd_psnr, fit_cubic, integrate_cubic, psnr, RdSample, PSNR_CAP};
pub use qmatrix::{QMatrix, QMatrixSet};
pub use reconstruct::reconstruct;
pub use si::make_side_information;
pub use transform::{forward_dct4, inverse_dct4, Block};
pub use video::{parse_y4m, read_raw, read_video, read_y4m, synthetic_sequence, write_raw, write_video, write_y4m};
