//! 8-bit frames and their DCT bands.
//!
//! Band `φ` collects coefficient `zigzag[φ]` of every 4×4 block, with blocks
//! in raster order.

use super::transform::{forward_dct4, inverse_dct4, Block};
use crate::{Error, Result};

/// Zigzag scan of a 4×4 block: `ZIGZAG[φ] = (row, col)`.
pub const ZIGZAG: [(usize, usize); 16] = [
    (0, 0),
    (0, 1),
    (1, 0),
    (2, 0),
    (1, 1),
    (0, 2),
    (0, 3),
    (1, 2),
    (2, 1),
    (3, 0),
    (3, 1),
    (2, 2),
    (1, 3),
    (2, 3),
    (3, 2),
    (3, 3),
];

/// Band index of block position `(row, col)`.
pub fn band_of(row: usize, col: usize) -> usize {
    ZIGZAG.iter().position(|&p| p == (row, col)).expect("position inside a 4x4 block")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameBuffer {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl FrameBuffer {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || width % 4 != 0 || height % 4 != 0 {
            return Err(Error::invalid(format!(
                "frame size {width}x{height} must be a nonzero multiple of 4"
            )));
        }
        if data.len() != width * height {
            return Err(Error::LengthMismatch {
                expected: width * height,
                actual: data.len(),
            });
        }
        Ok(FrameBuffer { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of 4×4 blocks, i.e. the band length.
    pub fn block_count(&self) -> usize {
        self.width * self.height / 16
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.data[y * self.width + x] = v;
    }

    pub fn same_size(&self, other: &FrameBuffer) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// DCT coefficients of a frame as 16 bands of length `w·h/16`.
pub fn extract_bands(frame: &FrameBuffer) -> [Vec<i64>; 16] {
    let mut bands: [Vec<i64>; 16] = Default::default();
    for b in &mut bands {
        b.reserve(frame.block_count());
    }
    for by in (0..frame.height).step_by(4) {
        for bx in (0..frame.width).step_by(4) {
            let mut block: Block = [[0; 4]; 4];
            for (r, row) in block.iter_mut().enumerate() {
                for (c, v) in row.iter_mut().enumerate() {
                    *v = frame.get(bx + c, by + r) as i32;
                }
            }
            let y = forward_dct4(&block);
            for (band, &(r, c)) in bands.iter_mut().zip(&ZIGZAG) {
                band.push(y[r][c] as i64);
            }
        }
    }
    bands
}

/// Inverse of [`extract_bands`]; samples are rounded and clamped to 8 bits.
pub fn assemble_frame(bands: &[Vec<i64>; 16], width: usize, height: usize) -> Result<FrameBuffer> {
    let mut frame = FrameBuffer::filled(width, height, 0)?;
    let n = frame.block_count();
    if let Some(b) = bands.iter().find(|b| b.len() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: b.len(),
        });
    }
    let mut i = 0;
    for by in (0..height).step_by(4) {
        for bx in (0..width).step_by(4) {
            let mut y: Block = [[0; 4]; 4];
            for (band, &(r, c)) in bands.iter().zip(&ZIGZAG) {
                y[r][c] = band[i].clamp(i32::MIN as i64 / 64, i32::MAX as i64 / 64) as i32;
            }
            let x = inverse_dct4(&y);
            for (r, row) in x.iter().enumerate() {
                for (c, &v) in row.iter().enumerate() {
                    frame.set(bx + c, by + r, v.clamp(0, 255) as u8);
                }
            }
            i += 1;
        }
    }
    Ok(frame)
}
