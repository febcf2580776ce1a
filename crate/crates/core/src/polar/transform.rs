use crate::{Error, Result};

/// In-place butterfly computing `x = u · F_t` over GF(2).
///
/// `F_t` is an involution, so applying this twice is the identity.
pub fn polar_transform_in_place(bits: &mut [u8]) -> Result<()> {
    let len = bits.len();
    if !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    let mut half = len / 2;
    while half >= 1 {
        for block in bits.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= *b;
            }
        }
        half /= 2;
    }
    Ok(())
}

/// Returns `u · F_t` for `u` of power-of-two length.
pub fn polar_transform(u: &[u8]) -> Result<Vec<u8>> {
    let mut x = u.to_vec();
    polar_transform_in_place(&mut x)?;
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// `F_t` built explicitly as a Kronecker power.
    fn kronecker_matrix(t: usize) -> Vec<Vec<u8>> {
        let mut m = vec![vec![1u8]];
        for _ in 0..t {
            let s = m.len();
            let mut next = vec![vec![0u8; 2 * s]; 2 * s];
            for (bi, bj, k) in [(0, 0, 1u8), (1, 0, 1), (1, 1, 1), (0, 1, 0)] {
                for i in 0..s {
                    for j in 0..s {
                        next[bi * s + i][bj * s + j] = k & m[i][j];
                    }
                }
            }
            m = next;
        }
        m
    }

    #[test]
    fn two_by_two_kernel() {
        assert_eq!(polar_transform(&[0, 1]).unwrap(), vec![1, 1]);
        assert_eq!(polar_transform(&[1, 0]).unwrap(), vec![1, 0]);
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(matches!(
            polar_transform(&[0, 1, 1]),
            Err(Error::NotPowerOfTwo(3))
        ));
    }

    #[test]
    fn matches_explicit_matrix_product() {
        let f3 = kronecker_matrix(3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let u: Vec<u8> = (0..8).map(|_| rng.random_range(0..2)).collect();
            let expected: Vec<u8> = (0..8)
                .map(|j| (0..8).fold(0, |acc, i| acc ^ (u[i] & f3[i][j])))
                .collect();
            assert_eq!(polar_transform(&u).unwrap(), expected);
        }
    }

    #[test]
    fn involution_exhaustive_small() {
        for len in [1usize, 2, 4, 8, 16] {
            for word in 0u32..(1 << len) {
                let u: Vec<u8> = (0..len).map(|i| ((word >> i) & 1) as u8).collect();
                let x = polar_transform(&u).unwrap();
                assert_eq!(polar_transform(&x).unwrap(), u);
            }
        }
    }
}
