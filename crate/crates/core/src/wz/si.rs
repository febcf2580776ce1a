//! Side information by temporal interpolation of the decoded key frames.

use super::bands::FrameBuffer;
use crate::{Error, Result};

/// Per-pixel weighted average of two keys. `t` is the position of the WZ
/// frame between `prev` (t = 0) and `next` (t = 1); the result is rounded
/// half away from zero.
pub fn make_side_information(prev: &FrameBuffer, next: &FrameBuffer, t: f64) -> Result<FrameBuffer> {
    if !prev.same_size(next) {
        return Err(Error::invalid(format!(
            "key frames differ in size: {}x{} vs {}x{}",
            prev.width(),
            prev.height(),
            next.width(),
            next.height()
        )));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(format!("interpolation position {t} outside [0, 1]")));
    }
    let data = prev
        .data()
        .iter()
        .zip(next.data())
        .map(|(&a, &b)| ((1.0 - t) * a as f64 + t * b as f64).round().clamp(0.0, 255.0) as u8)
        .collect();
    FrameBuffer::new(prev.width(), prev.height(), data)
}
