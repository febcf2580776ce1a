//! Soft inputs for bitplane decoding.
//!
//! At level `l` the decoder knows the first `l` label bits of each symbol;
//! the LLR of bit `l` compares the bins reachable through `prefix.0` with
//! those reachable through `prefix.1`. Integer bins `[lo, hi]` are taken as
//! the real intervals `[lo, hi + 1)` when integrating the Laplace density.

use serde::{Deserialize, Serialize};

use super::laplace::LaplaceModel;
use super::quantizer::{QuantizerKind, QuantizerSpec};
use crate::polar::{LlrVector, KNOWN_LLR};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LlrMode {
    /// Log-ratio of Laplace masses summed over the consistent bins.
    Basic,
    /// `α` times the difference of distances to the nearest consistent value.
    #[default]
    Proposed,
}

impl std::str::FromStr for LlrMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basic" => Ok(LlrMode::Basic),
            "proposed" => Ok(LlrMode::Proposed),
            other => Err(Error::invalid(format!("unknown LLR mode {other:?}"))),
        }
    }
}

fn prefix_value(prefix: &[u8]) -> usize {
    prefix.iter().fold(0, |acc, &b| (acc << 1) | (b & 1) as usize)
}

fn branch_intervals(q: &QuantizerSpec, value: usize, level: u32) -> [Option<(i64, i64)>; 2] {
    [
        q.prefix_interval(2 * value, level + 1),
        q.prefix_interval(2 * value + 1, level + 1),
    ]
}

fn basic_at(q: &QuantizerSpec, value: usize, level: u32, s: f64, model: &LaplaceModel) -> f64 {
    let mass = |iv: Option<(i64, i64)>| match iv {
        Some((lo, hi)) => model.ln_mass(lo as f64, (hi + 1) as f64, s),
        None => f64::NEG_INFINITY,
    };
    let [b0, b1] = branch_intervals(q, value, level);
    let (m0, m1) = (mass(b0), mass(b1));
    match (m0 == f64::NEG_INFINITY, m1 == f64::NEG_INFINITY) {
        (true, true) => 0.0,
        (false, true) => KNOWN_LLR,
        (true, false) => -KNOWN_LLR,
        (false, false) => (m0 - m1).clamp(-KNOWN_LLR, KNOWN_LLR),
    }
}

/// Basic LLR of label bit `prefix.len()` given side value `s`.
pub fn basic_llr(prefix: &[u8], s: f64, model: &LaplaceModel, q: &QuantizerSpec) -> f64 {
    assert!(prefix.len() < q.mu as usize, "prefix must be shorter than the label");
    basic_at(q, prefix_value(prefix), prefix.len() as u32, s, model)
}

/// Distance from `s` to the nearest integer of `[lo, hi]`.
fn distance(lo: i64, hi: i64, s: f64) -> f64 {
    let x = s.round().clamp(lo as f64, hi as f64);
    (x - s).abs()
}

fn generic_at(q: &QuantizerSpec, value: usize, level: u32, s: f64) -> f64 {
    let span = 1usize << (q.mu - level - 1);
    let nearest = |branch: usize| {
        q.prefix_bins(2 * value + branch, level + 1)
            .map(|(a, b)| {
                (a..=b)
                    .map(|j| {
                        let (lo, hi) = q.bin_bounds(j);
                        distance(lo, hi, s)
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .unwrap_or(f64::INFINITY)
    };
    debug_assert!(span >= 1);
    let (r0, r1) = (nearest(0), nearest(1));
    if r0.is_infinite() && r1.is_infinite() {
        0.0
    } else {
        r1 - r0
    }
}

/// `R = R1 - R0` with `Rj` the distance from `s` to the closest integer
/// whose label starts with `prefix.j`, found by scanning the consistent bins.
pub fn proposed_r_generic(prefix: &[u8], s: f64, q: &QuantizerSpec) -> f64 {
    assert!(prefix.len() < q.mu as usize, "prefix must be shorter than the label");
    generic_at(q, prefix_value(prefix), prefix.len() as u32, s)
}

/// Closed form of `R` for the uniform DC quantizer and integer `s`, using
/// only comparisons and additions: with `γ = β - l - 1` and `a` the lower
/// edge of the `prefix.0` region,
/// `R = 2^γ` for `s < a`, `-2^γ` for `s ≥ a + 2^{γ+1}`, and otherwise
/// `2^γ - (s - a) - ⌊(s - a) / 2^γ⌋`.
pub fn proposed_r_fast(prefix: &[u8], s: i64, beta: u32) -> i64 {
    let level = prefix.len() as u32;
    assert!(level < beta, "prefix must be shorter than beta");
    let gamma = beta - level - 1;
    let a = (prefix_value(prefix) as i64) << (gamma + 1);
    fast_at(a, gamma, s)
}

#[inline]
fn fast_at(a: i64, gamma: u32, s: i64) -> i64 {
    let g = 1i64 << gamma;
    if s < a {
        g
    } else if s >= a + 2 * g {
        -g
    } else {
        g - (s - a) - ((s - a) >> gamma)
    }
}

fn proposed_r_at(q: &QuantizerSpec, value: usize, level: u32, s: f64) -> f64 {
    if q.kind == QuantizerKind::UniformDc && s.fract() == 0.0 && s.abs() < 1e15 {
        let gamma = q.beta - level - 1;
        fast_at((value as i64) << (gamma + 1), gamma, s as i64) as f64
    } else {
        generic_at(q, value, level, s)
    }
}

/// `R` for any quantizer, taking the closed form when it applies.
pub fn proposed_r(prefix: &[u8], s: f64, q: &QuantizerSpec) -> f64 {
    assert!(prefix.len() < q.mu as usize, "prefix must be shorter than the label");
    proposed_r_at(q, prefix_value(prefix), prefix.len() as u32, s)
}

/// `α R`, saturated.
pub fn proposed_llr(prefix: &[u8], s: f64, model: &LaplaceModel, q: &QuantizerSpec) -> f64 {
    (model.alpha() * proposed_r(prefix, s, q)).clamp(-KNOWN_LLR, KNOWN_LLR)
}

/// LLRs of bitplane `level` for a whole band, given the already-decoded
/// label prefixes (as integers of `level` bits) and the side information.
pub fn level_llrs(
    mode: LlrMode,
    q: &QuantizerSpec,
    level: u32,
    prefixes: &[usize],
    si: &[f64],
    model: &LaplaceModel,
) -> Result<LlrVector> {
    if prefixes.len() != si.len() {
        return Err(Error::LengthMismatch {
            expected: si.len(),
            actual: prefixes.len(),
        });
    }
    if level >= q.mu {
        return Err(Error::invalid(format!("level {level} beyond label width {}", q.mu)));
    }
    let values = prefixes
        .iter()
        .zip(si)
        .map(|(&p, &s)| match mode {
            LlrMode::Basic => basic_at(q, p, level, s, model),
            LlrMode::Proposed => (model.alpha() * proposed_r_at(q, p, level, s)).clamp(-KNOWN_LLR, KNOWN_LLR),
        })
        .collect();
    LlrVector::new(values)
}
