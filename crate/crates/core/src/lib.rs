//! Distributed video coding built on rate-compatible shortened polar codes.
//!
//! The crate is organised bottom-up:
//!
//! - [`polar`]: polarizing transform, syndrome mapping of shortened codes,
//!   CRC and SC / SCL decoding with arbitrary frozen values.
//! - [`construction`]: Gaussian-approximation density evolution and the
//!   degradation-ordered reliability sequence that defines a nested chain.
//! - [`sw`]: Slepian-Wolf coding: quantizers, soft inputs, the rate-adaptive
//!   feedback loop and multistage decoding of multilevel labels.
//! - [`ldpca`]: LDPC-accumulate baseline with sum-product decoding.
//! - [`wz`]: the Wyner-Ziv video pipeline (integer DCT, bands, side
//!   information, reconstruction, GOP orchestration and metrics).
//! - [`harness`]: experiment configuration and the commands behind the `dvc`
//!   binary.

pub mod bits;
pub mod construction;
pub mod error;
pub mod harness;
pub mod ldpca;
pub mod polar;
pub mod sw;
pub mod wz;

pub use error::{Error, Result};

/// Package version plus `git describe` output when built from a checkout.
pub const VERSION: &str = env!("DVC_VERSION");
