use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::transform::polar_transform_in_place;
use crate::construction::ReliabilitySequence;
use crate::{Error, Result};

/// A shortened polar code of length `n` carved out of a mother code of length
/// `N = 2^t`, `t = ceil(log2 n)`, together with the reliability sequence that
/// orders its `u`-domain positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarCodeSpec {
    t: usize,
    n: usize,
    reliability: ReliabilitySequence,
    /// Inverse of `reliability`: u-index -> position in the ordered syndrome.
    rank: Vec<usize>,
}

impl PolarCodeSpec {
    pub fn new(reliability: ReliabilitySequence) -> Self {
        let n = reliability.len();
        let t = mother_exponent(n);
        let mut rank = vec![0; n];
        for (pos, &u) in reliability.indices().iter().enumerate() {
            rank[u] = pos;
        }
        PolarCodeSpec {
            t,
            n,
            reliability,
            rank,
        }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Mother code length `N = 2^t`.
    pub fn mother_len(&self) -> usize {
        1 << self.t
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn reliability(&self) -> &ReliabilitySequence {
        &self.reliability
    }

    /// Shortened indices, identical in the `u` and `x` domains.
    pub fn shortened(&self) -> Range<usize> {
        self.n..self.mother_len()
    }

    /// Position of u-index `u` inside the ordered syndrome.
    pub fn syndrome_position(&self, u: usize) -> usize {
        self.rank[u]
    }

    /// Frozen map of the code whose syndrome prefix is `prefix`: u-indices
    /// `reliability[j]` take `prefix[j]`, shortened indices are 0, all others
    /// are information positions.
    pub fn frozen_map(&self, prefix: &[u8]) -> Result<Vec<Option<u8>>> {
        if prefix.len() > self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: prefix.len(),
            });
        }
        let mut frozen = vec![None; self.mother_len()];
        for (&u, &h) in self.reliability.indices().iter().zip(prefix) {
            frozen[u] = Some(h & 1);
        }
        for slot in &mut frozen[self.n..] {
            *slot = Some(0);
        }
        Ok(frozen)
    }
}

/// Smallest `t` with `2^t >= n`.
pub(crate) fn mother_exponent(n: usize) -> usize {
    n.max(1).next_power_of_two().trailing_zeros() as usize
}

/// Chain of nested codes `C_0 ⊃ C_1 ⊃ … ⊃ C_{ω-1}` given by strictly decreasing
/// dimensions with `k_{ω-1} = 0`. Code `i` is described by the first `n - k_i`
/// bits of the ordered syndrome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NestedChain {
    n: usize,
    dims: Vec<usize>,
}

impl NestedChain {
    pub fn new(n: usize, dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::invalid("nested chain needs at least one code"));
        }
        if dims[0] >= n {
            return Err(Error::invalid(format!(
                "first dimension {} must be below the length {n}",
                dims[0]
            )));
        }
        if dims.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::invalid("chain dimensions must strictly decrease"));
        }
        if *dims.last().unwrap() != 0 {
            return Err(Error::invalid(
                "last code of the chain must have dimension 0",
            ));
        }
        Ok(NestedChain { n, dims })
    }

    /// `k_0 = n - first_chunk`, then steps of `step` down to 0.
    pub fn uniform(n: usize, first_chunk: usize, step: usize) -> Result<Self> {
        if first_chunk == 0 || step == 0 || first_chunk > n {
            return Err(Error::invalid(format!(
                "invalid uniform chain: n={n}, first={first_chunk}, step={step}"
            )));
        }
        let mut dims = Vec::new();
        let mut k = n - first_chunk;
        while k > 0 {
            dims.push(k);
            k = k.saturating_sub(step);
        }
        dims.push(0);
        Self::new(n, dims)
    }

    /// Default chain: steps of `round(n / 66)` with a double-size first chunk.
    /// For `n = 1584` this is `1536, 1512, …, 24, 0`.
    pub fn default_for(n: usize) -> Result<Self> {
        let step = ((n as f64 / 66.0).round() as usize).max(1);
        Self::uniform(n, (2 * step).min(n), step)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Number of codes ω.
    pub fn omega(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, i: usize) -> usize {
        self.dims[i]
    }

    /// Syndrome bits describing code `i`: `n - k_i`.
    pub fn syndrome_len(&self, i: usize) -> usize {
        self.n - self.dims[i]
    }

    /// Syndrome positions requested at stage `i` (with `k_{-1} = n`).
    pub fn chunk(&self, i: usize) -> Range<usize> {
        let start = if i == 0 { 0 } else { self.syndrome_len(i - 1) };
        start..self.syndrome_len(i)
    }
}

/// Ordered syndrome of the bitplane `b`.
///
/// Embeds `x = (b, 0^{N-n})`, computes `u = x · F_t` and lists the dynamic
/// `u` values in reliability order, so that every prefix is the syndrome of a
/// code of the nested chain.
pub fn sw_encode_syndrome(b: &[u8], spec: &PolarCodeSpec) -> Result<Vec<u8>> {
    if b.len() != spec.len() {
        return Err(Error::LengthMismatch {
            expected: spec.len(),
            actual: b.len(),
        });
    }
    let mut u = vec![0u8; spec.mother_len()];
    u[..b.len()].copy_from_slice(b);
    polar_transform_in_place(&mut u)?;
    assert!(
        u[spec.len()..].iter().all(|&v| v == 0),
        "shortened u positions must vanish"
    );
    Ok(spec.reliability().indices().iter().map(|&i| u[i]).collect())
}

/// Inverse of [`sw_encode_syndrome`] given the complete syndrome.
pub fn recover_bitplane_full(h: &[u8], spec: &PolarCodeSpec) -> Result<Vec<u8>> {
    if h.len() != spec.len() {
        return Err(Error::LengthMismatch {
            expected: spec.len(),
            actual: h.len(),
        });
    }
    let mut u = vec![0u8; spec.mother_len()];
    for (&i, &bit) in spec.reliability().indices().iter().zip(h) {
        u[i] = bit & 1;
    }
    polar_transform_in_place(&mut u)?;
    u.truncate(spec.len());
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::polar_transform;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_bits(rng: &mut impl Rng, n: usize) -> Vec<u8> {
        (0..n).map(|_| rng.random_range(0..2)).collect()
    }

    fn spec_with_shuffle(n: usize, seed: u64) -> PolarCodeSpec {
        use rand::seq::SliceRandom;
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        PolarCodeSpec::new(ReliabilitySequence::new(idx).unwrap())
    }

    #[test]
    fn geometry() {
        let spec = spec_with_shuffle(1584, 1);
        assert_eq!(spec.t(), 11);
        assert_eq!(spec.mother_len(), 2048);
        assert_eq!(spec.shortened(), 1584..2048);
        assert_eq!(mother_exponent(1), 0);
        assert_eq!(mother_exponent(16), 4);
        assert_eq!(mother_exponent(17), 5);
    }

    #[test]
    fn zero_bitplane_has_zero_syndrome() {
        let spec = spec_with_shuffle(100, 2);
        assert_eq!(sw_encode_syndrome(&[0; 100], &spec).unwrap(), vec![0; 100]);
        assert_eq!(
            recover_bitplane_full(&[0; 100], &spec).unwrap(),
            vec![0; 100]
        );
    }

    #[test]
    fn syndrome_is_linear() {
        let spec = spec_with_shuffle(77, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let a = random_bits(&mut rng, 77);
            let b = random_bits(&mut rng, 77);
            let lhs = sw_encode_syndrome(&crate::bits::xor(&a, &b), &spec).unwrap();
            let rhs = crate::bits::xor(
                &sw_encode_syndrome(&a, &spec).unwrap(),
                &sw_encode_syndrome(&b, &spec).unwrap(),
            );
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn unshortened_identity_order_is_the_transform() {
        let spec = PolarCodeSpec::new(ReliabilitySequence::new((0..64).collect()).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let b = random_bits(&mut rng, 64);
            let expected = polar_transform(&b).unwrap();
            assert_eq!(sw_encode_syndrome(&b, &spec).unwrap(), expected);
            assert_eq!(recover_bitplane_full(&b, &spec).unwrap(), expected);
        }
    }

    #[test]
    fn shortening_forces_zero_u_exhaustive() {
        for n in 1..=16usize {
            let big_n = n.next_power_of_two();
            for word in 0u32..(1 << n) {
                let mut x = vec![0u8; big_n];
                for (i, slot) in x.iter_mut().enumerate().take(n) {
                    *slot = ((word >> i) & 1) as u8;
                }
                let u = polar_transform(&x).unwrap();
                assert!(u[n..].iter().all(|&v| v == 0));
            }
        }
    }

    #[test]
    fn encode_recover_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in [1usize, 2, 5, 100, 513] {
            let spec = spec_with_shuffle(n, n as u64);
            for _ in 0..50 {
                let b = random_bits(&mut rng, n);
                let h = sw_encode_syndrome(&b, &spec).unwrap();
                assert_eq!(recover_bitplane_full(&h, &spec).unwrap(), b);
            }
        }
    }

    #[test]
    fn frozen_map_layout() {
        let spec = PolarCodeSpec::new(ReliabilitySequence::new(vec![2, 0, 1]).unwrap());
        let frozen = spec.frozen_map(&[1, 0]).unwrap();
        assert_eq!(frozen, vec![Some(0), None, Some(1), Some(0)]);
        assert!(spec.frozen_map(&[0; 4]).is_err());
    }

    #[test]
    fn chain_validation_and_default() {
        let chain = NestedChain::default_for(1584).unwrap();
        assert_eq!(chain.omega(), 65);
        assert_eq!(chain.dim(0), 1536);
        assert_eq!(chain.dim(1), 1512);
        assert_eq!(chain.dim(63), 24);
        assert_eq!(chain.dim(64), 0);
        assert_eq!(chain.chunk(0), 0..48);
        assert_eq!(chain.chunk(1), 48..72);
        assert_eq!(chain.chunk(64), 1560..1584);

        assert!(NestedChain::new(10, vec![]).is_err());
        assert!(NestedChain::new(10, vec![10, 0]).is_err());
        assert!(NestedChain::new(10, vec![5, 5, 0]).is_err());
        assert!(NestedChain::new(10, vec![5, 2]).is_err());
        assert_eq!(NestedChain::uniform(10, 3, 4).unwrap().dims(), &[7, 3, 0]);
    }
}
