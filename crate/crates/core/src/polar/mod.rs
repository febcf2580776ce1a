//! Shortened polar code engine.
//!
//! Conventions used throughout: a codeword is `x = u · F_t` with
//! `F_t = [[1,0],[1,1]]^{⊗t}` and no bit-reversal permutation. `u` index 0 is
//! the first decoded bit, `x` index 0 the first transmitted symbol. A code of
//! length `n < N = 2^t` is obtained by shortening the last `N - n` positions,
//! which are zero both in the `u` and in the `x` domain.

mod code;
mod crc;
mod decoder;
mod transform;

pub use code::{recover_bitplane_full, sw_encode_syndrome, NestedChain, PolarCodeSpec};
pub use crc::CrcSpec;
pub use decoder::{
    penalty, sc_decode, scl_decode, Kernel, LlrVector, ScOutput, SclDecoder, SclOutput, KNOWN_LLR,
};
pub use transform::{polar_transform, polar_transform_in_place};
