//! Quantization matrices: bits per 4×4 position for each index `f`.

use serde::{Deserialize, Serialize};

use super::bands::ZIGZAG;
use crate::{Error, Result};

const DEFAULT_JSON: &str = include_str!("../../config/qmatrices.json");

pub type QMatrix = [[u32; 4]; 4];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QMatrixSet {
    matrices: Vec<QMatrix>,
}

#[derive(Deserialize)]
struct QMatrixFile {
    matrices: Vec<QMatrix>,
}

impl QMatrixSet {
    /// Validates entry range and monotone refinement across indices.
    pub fn new(matrices: Vec<QMatrix>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::invalid("no quantization matrices"));
        }
        for (f, m) in matrices.iter().enumerate() {
            if m.iter().flatten().any(|&b| b > 8) {
                return Err(Error::invalid(format!("matrix {f}: bit depths must be in [0, 8]")));
            }
            if f > 0 {
                let prev = &matrices[f - 1];
                if (0..16).any(|k| m[k / 4][k % 4] < prev[k / 4][k % 4]) {
                    return Err(Error::invalid(format!("matrix {f} is coarser than matrix {}", f - 1)));
                }
            }
        }
        Ok(QMatrixSet { matrices })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: QMatrixFile = serde_json::from_str(text)?;
        Self::new(file.matrices)
    }

    /// The eight built-in matrices (`config/qmatrices.json`).
    pub fn builtin() -> Self {
        Self::from_json(DEFAULT_JSON).expect("built-in quantization matrices are valid")
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrix(&self, f: usize) -> Result<&QMatrix> {
        self.matrices
            .get(f)
            .ok_or_else(|| Error::invalid(format!("quantization index {f} out of range 0..{}", self.len())))
    }

    /// Bits of every band (zigzag order) at index `f`.
    pub fn band_bits(&self, f: usize) -> Result<[u32; 16]> {
        let m = self.matrix(f)?;
        Ok(ZIGZAG.map(|(r, c)| m[r][c]))
    }
}
