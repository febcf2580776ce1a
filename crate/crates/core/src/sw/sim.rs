//! Synthetic Slepian-Wolf experiments over an integer Laplace channel.
//!
//! The source is uniform over the quantizer range and the side information
//! is `s = x + round(L)` with `L` Laplace(α).

use rand::Rng;

use super::laplace::LaplaceModel;
use super::llr::LlrMode;
use super::multistage::{encode_band, multistage_decode_band};
use super::quantizer::QuantizerSpec;
use super::session::{SwCode, SwSession, Terminal};
use crate::Result;

/// Draws `n` source symbols and their side information.
pub fn draw_band<R: Rng + ?Sized>(rng: &mut R, n: usize, q: &QuantizerSpec, model: &LaplaceModel) -> (Vec<i64>, Vec<f64>) {
    let (lo, hi) = q.range();
    let x: Vec<i64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
    let s = x.iter().map(|&v| v as f64 + model.sample(rng).round()).collect();
    (x, s)
}

/// Empirical conditional entropy `mean_i -log2 P(Q(x_i) | s_i)` in bits per
/// symbol, using the exact posterior of the integer channel.
///
/// With `x` uniform, `P(Q(x) = j | s) ∝ P(s - hi_j - ½ ≤ L < s - lo_j + ½)`.
pub fn conditional_entropy(x: &[i64], s: &[f64], q: &QuantizerSpec, model: &LaplaceModel) -> f64 {
    let (rlo, rhi) = q.range();
    let mut total = 0.0;
    for (&xi, &si) in x.iter().zip(s) {
        let (lo, hi) = q.bin_bounds(q.bin_of(xi).0);
        let num = model.ln_mass(si - hi as f64 - 0.5, si - lo as f64 + 0.5, 0.0);
        let den = model.ln_mass(si - rhi as f64 - 0.5, si - rlo as f64 + 0.5, 0.0);
        total += -(num - den) / std::f64::consts::LN_2;
    }
    total / x.len() as f64
}

/// Outcome of one synthetic band.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    /// Syndrome plus CRC bits over all bitplanes.
    pub bits_sent: usize,
    /// `n · μ`.
    pub source_bits: usize,
    /// Conditional entropy of the labels, bits per symbol.
    pub entropy: f64,
    /// Bitplanes whose decoded value differs from the truth (CRC false accepts).
    pub false_accepts: usize,
    pub inversions: usize,
    pub bitplanes: usize,
}

impl TrialOutcome {
    /// Bits sent per source bit.
    pub fn rate(&self) -> f64 {
        self.bits_sent as f64 / self.source_bits as f64
    }

    /// Entropy bound in bits per source bit.
    pub fn entropy_rate(&self, mu: u32) -> f64 {
        self.entropy / mu as f64
    }
}

/// Codes one synthetic band end to end and reports its rate.
pub fn run_trial<C: SwCode, R: Rng + ?Sized>(
    session: &mut SwSession<C>,
    rng: &mut R,
    q: &QuantizerSpec,
    model: &LaplaceModel,
    mode: LlrMode,
) -> Result<TrialOutcome> {
    let n = session.code.len();
    let (x, s) = draw_band(rng, n, q, model);
    run_trial_on(session, &x, &s, q, model, mode)
}

/// [`run_trial`] on given data; used for paired comparisons.
pub fn run_trial_on<C: SwCode>(
    session: &mut SwSession<C>,
    x: &[i64],
    s: &[f64],
    q: &QuantizerSpec,
    model: &LaplaceModel,
    mode: LlrMode,
) -> Result<TrialOutcome> {
    let start = session.transcript.records.len();
    let enc = encode_band(session, x, q)?;
    let decoded = multistage_decode_band(session, &enc, s, model, mode)?;
    let truth = q.quantize_band(x).bins;
    let records = &session.transcript.records[start..];
    let mut false_accepts = 0;
    for (l, _) in records.iter().enumerate() {
        let shift = q.mu - l as u32 - 1;
        if decoded.iter().zip(&truth).any(|(a, b)| (a >> shift) & 1 != (b >> shift) & 1) {
            false_accepts += 1;
        }
    }
    Ok(TrialOutcome {
        bits_sent: records.iter().map(|r| r.bits_sent).sum(),
        source_bits: x.len() * q.mu as usize,
        entropy: conditional_entropy(x, s, q, model),
        false_accepts,
        inversions: records
            .iter()
            .filter(|r| r.terminal == Terminal::FullSyndromeInverted)
            .count(),
        bitplanes: records.len(),
    })
}
