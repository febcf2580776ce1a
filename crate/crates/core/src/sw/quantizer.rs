//! Scalar quantizers with MSB-first binary labels.
//!
//! Bin `j` carries the `μ`-bit label whose value is `j`, so the bins that
//! share a label prefix always form one contiguous integer interval.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantizerKind {
    /// `2^μ` bins of width `2^(β-μ)` over `[0, 2^β)`.
    UniformDc,
    /// `2^μ - 1` bins over `(-2^β, 2^β)` with a zero bin of twice the width.
    DoubledZeroAc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantizerSpec {
    pub band: usize,
    pub mu: u32,
    pub beta: u32,
    pub kind: QuantizerKind,
}

/// Result of quantizing a band: bin indices plus the number of out-of-range
/// inputs that were clamped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantizedBand {
    pub bins: Vec<usize>,
    pub clamped: usize,
}

impl QuantizerSpec {
    pub fn new(band: usize, kind: QuantizerKind, beta: u32, mu: u32) -> Result<Self> {
        if band >= 16 {
            return Err(Error::invalid(format!("band {band} out of range")));
        }
        if mu == 0 || mu > 16 || mu > beta || beta > 30 {
            return Err(Error::invalid(format!("unsupported quantizer beta={beta} mu={mu}")));
        }
        Ok(QuantizerSpec { band, mu, beta, kind })
    }

    pub fn uniform_dc(beta: u32, mu: u32) -> Result<Self> {
        Self::new(0, QuantizerKind::UniformDc, beta, mu)
    }

    pub fn doubled_zero_ac(band: usize, beta: u32, mu: u32) -> Result<Self> {
        Self::new(band, QuantizerKind::DoubledZeroAc, beta, mu)
    }

    /// Number of bins `M`.
    pub fn level_count(&self) -> usize {
        match self.kind {
            QuantizerKind::UniformDc => 1 << self.mu,
            QuantizerKind::DoubledZeroAc => (1 << self.mu) - 1,
        }
    }

    /// Inclusive integer dynamic range.
    pub fn range(&self) -> (i64, i64) {
        let top = 1i64 << self.beta;
        match self.kind {
            QuantizerKind::UniformDc => (0, top - 1),
            QuantizerKind::DoubledZeroAc => (-top + 1, top - 1),
        }
    }

    /// Width of a regular bin (`2^(β-μ)` for DC, `2^(β-μ+1)` for AC).
    fn step(&self) -> i64 {
        match self.kind {
            QuantizerKind::UniformDc => 1 << (self.beta - self.mu),
            QuantizerKind::DoubledZeroAc => 1 << (self.beta - self.mu + 1),
        }
    }

    fn zero_bin(&self) -> i64 {
        (1i64 << (self.mu - 1)) - 1
    }

    /// Bin containing `x` after clamping to the dynamic range, and whether a
    /// clamp happened.
    pub fn bin_of(&self, x: i64) -> (usize, bool) {
        let (lo, hi) = self.range();
        let clamped = x < lo || x > hi;
        let x = x.clamp(lo, hi);
        let w = self.step();
        let j = match self.kind {
            QuantizerKind::UniformDc => x / w,
            QuantizerKind::DoubledZeroAc => {
                let c = self.zero_bin();
                if x >= 0 {
                    c + x / w
                } else {
                    c - (-x) / w
                }
            }
        };
        (j as usize, clamped)
    }

    /// Inclusive integer bounds of bin `j`.
    pub fn bin_bounds(&self, j: usize) -> (i64, i64) {
        assert!(j < self.level_count(), "bin {j} out of range");
        let w = self.step();
        match self.kind {
            QuantizerKind::UniformDc => (j as i64 * w, (j as i64 + 1) * w - 1),
            QuantizerKind::DoubledZeroAc => {
                let k = j as i64 - self.zero_bin();
                match k.cmp(&0) {
                    std::cmp::Ordering::Equal => (-w + 1, w - 1),
                    std::cmp::Ordering::Greater => (k * w, (k + 1) * w - 1),
                    std::cmp::Ordering::Less => ((k - 1) * w + 1, k * w),
                }
            }
        }
    }

    pub fn bin_width(&self, j: usize) -> i64 {
        let (lo, hi) = self.bin_bounds(j);
        hi - lo + 1
    }

    /// MSB-first label of bin `j`.
    pub fn label(&self, j: usize) -> Vec<u8> {
        (0..self.mu).map(|k| ((j >> (self.mu - k - 1)) & 1) as u8).collect()
    }

    pub fn quantize(&self, x: i64) -> Vec<u8> {
        self.label(self.bin_of(x).0)
    }

    /// Bins whose label starts with the `level`-bit prefix `value`, as an
    /// inclusive range; `None` when no bin carries that prefix.
    pub fn prefix_bins(&self, value: usize, level: u32) -> Option<(usize, usize)> {
        debug_assert!(level <= self.mu);
        let span = 1usize << (self.mu - level);
        let first = value * span;
        let last = ((value + 1) * span).min(self.level_count()) - 1;
        (first < self.level_count() && first <= last).then_some((first, last))
    }

    /// Integer interval covered by the bins with a given label prefix.
    pub fn prefix_interval(&self, value: usize, level: u32) -> Option<(i64, i64)> {
        self.prefix_bins(value, level)
            .map(|(a, b)| (self.bin_bounds(a).0, self.bin_bounds(b).1))
    }

    pub fn quantize_band(&self, values: &[i64]) -> QuantizedBand {
        let mut clamped = 0;
        let bins = values
            .iter()
            .map(|&x| {
                let (j, c) = self.bin_of(x);
                clamped += usize::from(c);
                j
            })
            .collect();
        if clamped > 0 {
            log::warn!("band {}: {clamped} values clamped to the quantizer range", self.band);
        }
        QuantizedBand { bins, clamped }
    }
}

/// Bit `level` (MSB first) of every label.
pub fn bitplane(bins: &[usize], mu: u32, level: u32) -> Vec<u8> {
    bins.iter().map(|&j| ((j >> (mu - level - 1)) & 1) as u8).collect()
}
