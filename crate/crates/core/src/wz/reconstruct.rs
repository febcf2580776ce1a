//! Minimum-MSE reconstruction of a quantized coefficient from its bin and
//! the side information.

use crate::sw::{LaplaceModel, QuantizerSpec};

/// `E[X | X ∈ bin, s]` under the Laplace model, rounded and kept inside the
/// bin. The integer bin `[lo, hi]` is treated as the real interval
/// `[lo, hi + 1)`.
pub fn reconstruct(bin: usize, s: f64, model: &LaplaceModel, q: &QuantizerSpec) -> i64 {
    let (lo, hi) = q.bin_bounds(bin);
    let c = model.centroid(lo as f64, (hi + 1) as f64, s);
    if c.is_finite() {
        (c.round() as i64).clamp(lo, hi)
    } else {
        (s.round() as i64).clamp(lo, hi)
    }
}
