//! Dense bit matrices over GF(2).

/// Row-major bit matrix; each row is packed into `u64` words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64);
        BitMatrix {
            rows,
            cols,
            stride,
            words: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.words[r * self.stride + c / 64] >> (c % 64)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.words[r * self.stride + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        self.words[r * self.stride + c / 64] ^= 1 << (c % 64);
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.words[r * self.stride..(r + 1) * self.stride]
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let s = self.stride;
        let (a, b) = if src < dst {
            let (lo, hi) = self.words.split_at_mut(dst * s);
            (&lo[src * s..(src + 1) * s], &mut hi[..s])
        } else {
            let (lo, hi) = self.words.split_at_mut(src * s);
            (&hi[..s] as &[u64], &mut lo[dst * s..(dst + 1) * s])
        };
        for (d, &x) in b.iter_mut().zip(a) {
            *d ^= x;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for k in 0..self.stride {
                self.words.swap(a * self.stride + k, b * self.stride + k);
            }
        }
    }

    /// `M v` for a bit vector `v` of length `cols`.
    pub fn mul_vec(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.cols);
        let mut packed = vec![0u64; self.stride];
        for (i, &b) in v.iter().enumerate() {
            if b & 1 == 1 {
                packed[i / 64] |= 1 << (i % 64);
            }
        }
        (0..self.rows)
            .map(|r| {
                let ones: u32 = self.row(r).iter().zip(&packed).map(|(a, b)| (a & b).count_ones()).sum();
                (ones & 1) as u8
            })
            .collect()
    }

    /// Rank by Gaussian elimination on a copy.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.swap_rows(p, rank);
            for r in 0..m.rows {
                if r != rank && m.get(r, c) {
                    m.xor_row_into(rank, r);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<BitMatrix> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = BitMatrix::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&r| m.get(r, c))?;
            m.swap_rows(p, c);
            inv.swap_rows(p, c);
            for r in 0..n {
                if r != c && m.get(r, c) {
                    m.xor_row_into(c, r);
                    inv.xor_row_into(c, r);
                }
            }
        }
        Some(inv)
    }
}
