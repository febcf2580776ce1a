//! H.264-style 4×4 integer core transform.
//!
//! Forward: `Y = C X Cᵀ` with the kernel below. Since `C Cᵀ = diag(4, 10, 4, 10)`,
//! the inverse is `X = Cᵀ E Y E C / 400` with `E = diag(5, 2, 5, 2)`, which is
//! exact on any block produced by the forward transform.

pub type Block = [[i32; 4]; 4];

const C: [[i32; 4]; 4] = [[1, 1, 1, 1], [2, 1, -1, -2], [1, -1, -1, 1], [1, -2, 2, -1]];
const E: [i64; 4] = [5, 2, 5, 2];

pub fn forward_dct4(x: &Block) -> Block {
    let mut t = [[0i32; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            t[i][j] = (0..4).map(|k| C[i][k] * x[k][j]).sum();
        }
    }
    let mut y = [[0i32; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            y[i][j] = (0..4).map(|k| t[i][k] * C[j][k]).sum();
        }
    }
    y
}

/// Inverse transform, rounded to the nearest integer (exact for any output
/// of [`forward_dct4`]).
pub fn inverse_dct4(y: &Block) -> Block {
    let mut s = [[0i64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            s[i][j] = E[i] * E[j] * y[i][j] as i64;
        }
    }
    let mut t = [[0i64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            t[i][j] = (0..4).map(|k| C[k][i] as i64 * s[k][j]).sum();
        }
    }
    let mut x = [[0i32; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let v: i64 = (0..4).map(|k| t[i][k] * C[k][j] as i64).sum();
            x[i][j] = div_round(v, 400) as i32;
        }
    }
    x
}

fn div_round(v: i64, d: i64) -> i64 {
    let q = v.div_euclid(d);
    if 2 * v.rem_euclid(d) >= d {
        q + 1
    } else {
        q
    }
}
