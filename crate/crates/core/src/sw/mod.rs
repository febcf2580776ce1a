//! Slepian-Wolf coding of quantized DCT bands.

mod laplace;
mod llr;
mod multistage;
mod quantizer;
mod session;
pub mod sim;

pub use laplace::{fit_alpha, LaplaceModel};
pub use llr::{basic_llr, level_llrs, proposed_llr, proposed_r, proposed_r_fast, proposed_r_generic, LlrMode};
pub use multistage::{encode_band, multistage_decode_band, BandEncoding};
pub use quantizer::{bitplane, QuantizedBand, QuantizerKind, QuantizerSpec};
pub use session::{
    BitplaneBuffer, BitplaneRecord, ChunkRequest, FeedbackTranscript, PolarSwCode, SwCode, SwSession, Terminal,
};
