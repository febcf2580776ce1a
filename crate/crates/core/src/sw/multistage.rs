//! Multilevel coding of a quantized band: one SW-coded bitplane per label
//! bit, decoded MSB first with LLRs conditioned on the bits already known.

use serde::{Deserialize, Serialize};

use super::laplace::LaplaceModel;
use super::llr::{level_llrs, LlrMode};
use super::quantizer::{bitplane, QuantizerSpec};
use super::session::{BitplaneBuffer, SwCode, SwSession};
use crate::{Error, Result};

/// Encoder output for one band.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandEncoding {
    pub quantizer: QuantizerSpec,
    /// One buffer per label bit, MSB first.
    pub planes: Vec<BitplaneBuffer>,
    /// Inputs clamped into the quantizer range.
    pub clamped: usize,
}

pub fn encode_band<C: SwCode>(session: &SwSession<C>, values: &[i64], q: &QuantizerSpec) -> Result<BandEncoding> {
    let quantized = q.quantize_band(values);
    let planes = (0..q.mu)
        .map(|l| session.compress(&bitplane(&quantized.bins, q.mu, l)))
        .collect::<Result<Vec<_>>>()?;
    Ok(BandEncoding {
        quantizer: q.clone(),
        planes,
        clamped: quantized.clamped,
    })
}

/// Decodes all bitplanes of `encoding` and returns the bin index of every
/// symbol. Each bitplane is logged in the session transcript.
pub fn multistage_decode_band<C: SwCode>(
    session: &mut SwSession<C>,
    encoding: &BandEncoding,
    si: &[f64],
    model: &LaplaceModel,
    mode: LlrMode,
) -> Result<Vec<usize>> {
    let q = &encoding.quantizer;
    if encoding.planes.len() != q.mu as usize {
        return Err(Error::Decode(format!(
            "band {} carries {} bitplanes, expected {}",
            q.band,
            encoding.planes.len(),
            q.mu
        )));
    }
    let mut prefixes = vec![0usize; si.len()];
    for (l, buffer) in encoding.planes.iter().enumerate() {
        let level = l as u32;
        let llr = level_llrs(mode, q, level, &prefixes, si, model)?;
        let bits = session.decode_bitplane(&llr, buffer, q.band, level)?;
        for (p, b) in prefixes.iter_mut().zip(bits) {
            *p = (*p << 1) | b as usize;
        }
    }
    // An AC label can only be invalid after a CRC false accept.
    let top = q.level_count() - 1;
    Ok(prefixes.into_iter().map(|j| j.min(top)).collect())
}
