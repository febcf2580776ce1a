//! LDPC-accumulate (LDPCA) baseline for rate-adaptive Slepian-Wolf coding.
//!
//! The encoder computes the base syndrome `H b` of a regular degree-3 graph
//! and accumulates it (`a_i = a_{i-1} ⊕ s_i`). Accumulated bits are sent in
//! a fixed nested order; any received subset `p_1 < … < p_m` is equivalent
//! to the merged checks `a_{p_j} ⊕ a_{p_{j-1}} = ⊕_{p_{j-1} < i ≤ p_j} s_i`.
//! The full syndrome is inverted with a precomputed `H⁻¹`.

mod bp;
mod gf2;
mod graph;

use std::collections::HashMap;

pub use bp::{bp_decode, BpOutput, BpStop, CheckSet, MESSAGE_CLAMP, STALL_LIMIT};
pub use gf2::BitMatrix;
pub use graph::{BaseGraph, VARIABLE_DEGREE};

use crate::polar::{CrcSpec, LlrVector, NestedChain};
use crate::sw::SwCode;
use crate::{Error, Result};

/// Generation attempts tried after `seed` before giving up on a full-rank graph.
const MAX_ATTEMPTS: u64 = 256;

/// Order in which accumulated syndrome positions are sent: `n - 1` first,
/// then positions spread by the base-2 van der Corput sequence, skipping
/// repeats. Every prefix is roughly evenly spaced.
pub fn transmission_order(n: usize) -> Vec<usize> {
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut r: u64 = 0;
    while order.len() < n {
        let vdc = van_der_corput(r);
        r += 1;
        let pos = (((1.0 - vdc) * n as f64).ceil() as usize).clamp(1, n) - 1;
        if !seen[pos] {
            seen[pos] = true;
            order.push(pos);
        }
        if r > 64 * n as u64 {
            // Fill anything the sequence missed (not expected in practice).
            order.extend((0..n).filter(|&p| !seen[p]));
            break;
        }
    }
    order
}

fn van_der_corput(mut r: u64) -> f64 {
    let (mut v, mut denom) = (0.0, 1.0);
    while r > 0 {
        denom *= 2.0;
        v += (r & 1) as f64 / denom;
        r >>= 1;
    }
    v
}

/// A full-rank LDPCA code with its inverse and transmission order.
#[derive(Clone, Debug)]
pub struct LdpcaCode {
    graph: BaseGraph,
    inverse: BitMatrix,
    order: Vec<usize>,
}

impl LdpcaCode {
    /// First graph at seeds `seed, seed + 1, …` whose matrix is invertible.
    pub fn new(n: usize, seed: u64) -> Result<Self> {
        for k in 0..MAX_ATTEMPTS {
            let Some(graph) = BaseGraph::generate(n, seed.wrapping_add(k)) else {
                continue;
            };
            if let Ok(code) = Self::from_graph(graph) {
                return Ok(code);
            }
        }
        Err(Error::invalid(format!(
            "no invertible degree-3 graph of length {n} within {MAX_ATTEMPTS} seeds from {seed}"
        )))
    }

    pub fn from_graph(graph: BaseGraph) -> Result<Self> {
        let n = graph.n;
        let mut h = BitMatrix::zeros(n, n);
        for (v, cs) in graph.var_checks.iter().enumerate() {
            for &c in cs {
                h.flip(c, v);
            }
        }
        let inverse = h.inverse().ok_or(Error::Singular)?;
        Ok(LdpcaCode {
            order: transmission_order(n),
            graph,
            inverse,
        })
    }

    pub fn graph(&self) -> &BaseGraph {
        &self.graph
    }

    pub fn len(&self) -> usize {
        self.graph.n
    }

    pub fn is_empty(&self) -> bool {
        self.graph.n == 0
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Accumulated syndrome in natural order.
    pub fn accumulated_syndrome(&self, bits: &[u8]) -> Vec<u8> {
        let mut s = self.graph.syndrome(bits);
        for i in 1..s.len() {
            s[i] ^= s[i - 1];
        }
        s
    }

    /// Accumulated syndrome in transmission order.
    pub fn encode(&self, bits: &[u8]) -> Result<Vec<u8>> {
        if bits.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: bits.len(),
            });
        }
        let acc = self.accumulated_syndrome(bits);
        Ok(self.order.iter().map(|&p| acc[p]).collect())
    }

    /// Merged checks implied by the first `received.len()` transmitted bits.
    pub fn merged_checks(&self, received: &[u8]) -> CheckSet {
        let m = received.len();
        let mut known: Vec<(usize, u8)> = self.order[..m].iter().copied().zip(received.iter().copied()).collect();
        known.sort_unstable();
        let base = self.graph.check_vars();
        let mut checks = Vec::with_capacity(m);
        let mut syndrome = Vec::with_capacity(m);
        let (mut prev_pos, mut prev_val) = (None::<usize>, 0u8);
        let mut parity: HashMap<usize, u8> = HashMap::new();
        for &(p, val) in &known {
            let start = prev_pos.map_or(0, |q| q + 1);
            parity.clear();
            for c in start..=p {
                for &v in &base[c] {
                    *parity.entry(v).or_insert(0) ^= 1;
                }
            }
            let mut vars: Vec<usize> = parity.iter().filter(|(_, &odd)| odd == 1).map(|(&v, _)| v).collect();
            vars.sort_unstable();
            checks.push(vars);
            syndrome.push(val ^ prev_val);
            prev_pos = Some(p);
            prev_val = val;
        }
        CheckSet {
            n: self.len(),
            checks,
            syndrome,
        }
    }

    /// Exact recovery from the complete transmitted syndrome.
    pub fn invert(&self, transmitted: &[u8]) -> Result<Vec<u8>> {
        let n = self.len();
        if transmitted.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: transmitted.len(),
            });
        }
        let mut acc = vec![0u8; n];
        for (&p, &v) in self.order.iter().zip(transmitted) {
            acc[p] = v;
        }
        let mut s = acc.clone();
        for i in 1..n {
            s[i] = acc[i] ^ acc[i - 1];
        }
        Ok(self.inverse.mul_vec(&s))
    }
}

/// [`LdpcaCode`] as a Slepian-Wolf backend over a nested chain.
pub struct LdpcaSwCode {
    code: LdpcaCode,
    chain: NestedChain,
    max_iterations: usize,
    cache: Vec<Option<CheckSet>>,
}

impl LdpcaSwCode {
    pub fn new(code: LdpcaCode, chain: NestedChain, max_iterations: usize) -> Result<Self> {
        if chain.len() != code.len() {
            return Err(Error::LengthMismatch {
                expected: code.len(),
                actual: chain.len(),
            });
        }
        let omega = chain.omega();
        Ok(LdpcaSwCode {
            code,
            chain,
            max_iterations,
            cache: vec![None; omega],
        })
    }

    pub fn code(&self) -> &LdpcaCode {
        &self.code
    }
}

impl SwCode for LdpcaSwCode {
    fn name(&self) -> &'static str {
        "ldpca"
    }

    fn chain(&self) -> &NestedChain {
        &self.chain
    }

    fn syndrome(&self, bits: &[u8]) -> Result<Vec<u8>> {
        self.code.encode(bits)
    }

    fn decode_stage(
        &mut self,
        stage: usize,
        llr: &LlrVector,
        syndrome: &[u8],
        _crc: (&CrcSpec, &[u8]),
    ) -> Result<Option<Vec<u8>>> {
        let m = self.chain.syndrome_len(stage);
        // The check structure depends only on the stage; refresh the values.
        let checks = match &mut self.cache[stage] {
            Some(c) => {
                let fresh = self.code.merged_checks(&syndrome[..m]);
                c.syndrome = fresh.syndrome;
                c
            }
            slot @ None => slot.insert(self.code.merged_checks(&syndrome[..m])),
        };
        let out = bp_decode(llr.as_slice(), checks, self.max_iterations);
        Ok(out.success().then_some(out.bits))
    }

    fn invert(&self, syndrome: &[u8]) -> Result<Vec<u8>> {
        self.code.invert(syndrome)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn order_is_a_nested_permutation() {
        for n in [1usize, 2, 3, 7, 100, 1584] {
            let o = transmission_order(n);
            let mut sorted = o.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, (0..n).collect::<Vec<_>>());
            assert_eq!(o[0], n - 1);
        }
        assert_eq!(&transmission_order(8)[..4], &[7, 3, 5, 1]);
    }

    #[test]
    fn full_syndrome_inverts_exactly() {
        let code = LdpcaCode::new(132, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..20 {
            let b: Vec<u8> = (0..132).map(|_| rng.random_range(0..2)).collect();
            assert_eq!(code.invert(&code.encode(&b).unwrap()).unwrap(), b);
        }
    }

    #[test]
    fn merged_checks_hold_for_the_source() {
        let code = LdpcaCode::new(132, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        let b: Vec<u8> = (0..132).map(|_| rng.random_range(0..2)).collect();
        let t = code.encode(&b).unwrap();
        for m in [1, 5, 24, 66, 131, 132] {
            let cs = code.merged_checks(&t[..m]);
            assert_eq!(cs.checks.len(), m);
            assert!(cs.satisfied_by(&b));
        }
        // The complete set is equivalent to the base checks.
        let full = code.merged_checks(&t);
        let base = code.graph().check_vars();
        for (c, vars) in full.checks.iter().enumerate() {
            let mut expect = base[c].clone();
            expect.sort_unstable();
            assert_eq!(vars, &expect);
        }
    }

    #[test]
    fn noiseless_recovery() {
        let code = LdpcaCode::new(264, 3).unwrap();
        let chain = NestedChain::default_for(264).unwrap();
        let mut sw = LdpcaSwCode::new(code, chain, 100).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let b: Vec<u8> = (0..264).map(|_| rng.random_range(0..2)).collect();
        let syn = sw.syndrome(&b).unwrap();
        let out = sw
            .decode_stage(0, &LlrVector::from_bits(&b), &syn, (&CrcSpec::CRC12, &[]))
            .unwrap();
        assert_eq!(out, Some(b));
    }
}
