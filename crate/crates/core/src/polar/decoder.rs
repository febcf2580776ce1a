//! Successive-cancellation decoding over the mother code.
//!
//! [`SclDecoder`] is an LLR-domain list decoder with lazily copied path
//! arrays: every depth of the decoding tree keeps a pool of `L` arrays and
//! paths share them until one of them writes. [`sc_decode`] is a plain
//! recursive SC decoder kept separate from the list decoder.

use serde::{Deserialize, Serialize};

use super::crc::CrcSpec;
use super::transform::polar_transform_in_place;
use crate::{Error, Result};

/// Magnitude used for bits that are known with certainty. Channel LLRs are
/// clamped to `±KNOWN_LLR` so path metrics stay finite.
pub const KNOWN_LLR: f64 = 1.0e6;

/// Soft input, `log(P(bit = 0) / P(bit = 1))` per position.
#[derive(Clone, Debug, PartialEq)]
pub struct LlrVector(Vec<f64>);

impl LlrVector {
    /// Rejects NaN; infinities and large values saturate at `±KNOWN_LLR`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let mut values = values;
        for (i, v) in values.iter_mut().enumerate() {
            if v.is_nan() {
                return Err(Error::NanLlr(i));
            }
            *v = v.clamp(-KNOWN_LLR, KNOWN_LLR);
        }
        Ok(LlrVector(values))
    }

    /// Noiseless LLRs for a known word.
    pub fn from_bits(bits: &[u8]) -> Self {
        LlrVector(
            bits.iter()
                .map(|&b| if b & 1 == 0 { KNOWN_LLR } else { -KNOWN_LLR })
                .collect(),
        )
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Check-node update rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kernel {
    /// `sign(a) sign(b) min(|a|, |b|)`.
    #[default]
    MinSum,
    /// Exact box-plus in a numerically stable form.
    Exact,
}

impl Kernel {
    #[inline(always)]
    fn f(self, a: f64, b: f64) -> f64 {
        let (ma, mb) = (a.abs(), b.abs());
        let mut m = ma.min(mb);
        if self == Kernel::Exact {
            m += (-(ma + mb)).exp().ln_1p() - (-(ma - mb).abs()).exp().ln_1p();
        }
        if (a < 0.0) != (b < 0.0) {
            -m
        } else {
            m
        }
    }
}

#[inline(always)]
fn g(a: f64, b: f64, left: u8) -> f64 {
    if left == 0 {
        b + a
    } else {
        b - a
    }
}

/// Path-metric increment for deciding `bit` against `llr`; never negative.
///
/// The min-sum kernel uses the hard approximation (`|llr|` on disagreement),
/// the exact kernel `ln(1 + exp(-(1 - 2 bit) llr))`.
#[inline]
pub fn penalty(kernel: Kernel, llr: f64, bit: u8) -> f64 {
    let signed = if bit == 0 { llr } else { -llr };
    match kernel {
        Kernel::MinSum => {
            if signed < 0.0 {
                -signed
            } else {
                0.0
            }
        }
        Kernel::Exact => (-signed).max(0.0) + (-signed.abs()).exp().ln_1p(),
    }
}

#[inline]
fn hard(llr: f64) -> u8 {
    u8::from(llr < 0.0)
}

fn prepare_channel(llr: &LlrVector, frozen: &[Option<u8>]) -> Result<Vec<f64>> {
    let big_n = frozen.len();
    if !big_n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(big_n));
    }
    if llr.len() > big_n {
        return Err(Error::LengthMismatch {
            expected: big_n,
            actual: llr.len(),
        });
    }
    if let Some(i) = (llr.len()..big_n).find(|&i| frozen[i].is_none()) {
        return Err(Error::FrozenMapIncomplete(i));
    }
    let mut channel = llr.as_slice().to_vec();
    channel.resize(big_n, KNOWN_LLR);
    Ok(channel)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScOutput {
    /// Decoded codeword prefix (first `n` symbols).
    pub x: Vec<u8>,
    /// Full decoded `u` vector of the mother code.
    pub u: Vec<u8>,
    pub metric: f64,
}

/// Plain successive-cancellation decoding.
///
/// `llr` covers `x` positions `[0, n)`; positions `[n, N)` are appended as
/// known zeros. `frozen` has one entry per mother-code `u` index.
pub fn sc_decode(llr: &LlrVector, frozen: &[Option<u8>], kernel: Kernel) -> Result<ScOutput> {
    let channel = prepare_channel(llr, frozen)?;
    let mut u = Vec::with_capacity(channel.len());
    let mut metric = 0.0;
    let x = sc_node(&channel, frozen, kernel, &mut u, &mut metric);
    Ok(ScOutput {
        x: x[..llr.len()].to_vec(),
        u,
        metric,
    })
}

fn sc_node(
    llr: &[f64],
    frozen: &[Option<u8>],
    kernel: Kernel,
    u: &mut Vec<u8>,
    metric: &mut f64,
) -> Vec<u8> {
    if llr.len() == 1 {
        let bit = frozen[0].unwrap_or_else(|| hard(llr[0]));
        *metric += penalty(kernel, llr[0], bit);
        u.push(bit);
        return vec![bit];
    }
    let half = llr.len() / 2;
    let (a, b) = llr.split_at(half);
    let left: Vec<f64> = a.iter().zip(b).map(|(&x, &y)| kernel.f(x, y)).collect();
    let v = sc_node(&left, &frozen[..half], kernel, u, metric);
    let right: Vec<f64> = (0..half).map(|i| g(a[i], b[i], v[i])).collect();
    let w = sc_node(&right, &frozen[half..], kernel, u, metric);
    let mut out: Vec<u8> = v.iter().zip(&w).map(|(p, q)| p ^ q).collect();
    out.extend_from_slice(&w);
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct SclOutput {
    /// Decoded codeword prefix (first `n` symbols).
    pub x: Vec<u8>,
    /// Full decoded `u` vector of the mother code.
    pub u: Vec<u8>,
    /// Whether the returned word passed the CRC (true when no CRC is given).
    pub crc_ok: bool,
    /// Path metric of the returned word.
    pub metric: f64,
    /// Metrics of all surviving paths, ascending.
    pub list_metrics: Vec<f64>,
}

/// One-shot list decoding; see [`SclDecoder::decode`].
pub fn scl_decode(
    llr: &LlrVector,
    frozen: &[Option<u8>],
    list_size: usize,
    kernel: Kernel,
    crc: Option<(&CrcSpec, &[u8])>,
) -> Result<SclOutput> {
    if list_size == 0 {
        return Err(Error::invalid("list size must be at least 1"));
    }
    SclDecoder::new(frozen.len(), list_size, kernel)?.decode(llr, frozen, crc)
}

/// Reusable successive-cancellation list decoder for a fixed mother length.
///
/// Depth `d` of the decoding tree (1 ≤ d ≤ t) holds nodes of size `N >> d`.
/// Each pooled array at depth `d` stores the node LLRs and two slots of
/// partial sums (left and right child outputs).
pub struct SclDecoder {
    t: usize,
    big_n: usize,
    list: usize,
    kernel: Kernel,
    llr_pool: Vec<Vec<f64>>,
    bit_pool: Vec<Vec<u8>>,
    refcount: Vec<Vec<u32>>,
    free: Vec<Vec<usize>>,
    owner: Vec<Vec<usize>>,
    active: Vec<bool>,
    metric: Vec<f64>,
    bit_hist: Vec<u8>,
    parent_hist: Vec<u16>,
    channel: Vec<f64>,
}

impl SclDecoder {
    pub fn new(mother_len: usize, list_size: usize, kernel: Kernel) -> Result<Self> {
        if !mother_len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(mother_len));
        }
        if list_size == 0 || list_size > u16::MAX as usize {
            return Err(Error::invalid(format!(
                "list size {list_size} out of range"
            )));
        }
        let t = mother_len.trailing_zeros() as usize;
        let l = list_size;
        let size = |d: usize| mother_len >> d;
        Ok(SclDecoder {
            t,
            big_n: mother_len,
            list: l,
            kernel,
            llr_pool: (0..=t)
                .map(|d| vec![0.0; if d == 0 { 0 } else { l * size(d) }])
                .collect(),
            bit_pool: (0..=t)
                .map(|d| vec![0; if d == 0 { 0 } else { 2 * l * size(d) }])
                .collect(),
            refcount: vec![vec![0; l]; t + 1],
            free: vec![Vec::with_capacity(l); t + 1],
            owner: vec![vec![0; l]; t + 1],
            active: vec![false; l],
            metric: vec![0.0; l],
            bit_hist: vec![0; mother_len * l],
            parent_hist: vec![0; mother_len * l],
            channel: Vec::with_capacity(mother_len),
        })
    }

    pub fn list_size(&self) -> usize {
        self.list
    }

    pub fn mother_len(&self) -> usize {
        self.big_n
    }

    fn reset(&mut self) {
        for d in 1..=self.t {
            self.refcount[d].fill(0);
            self.free[d].clear();
            self.free[d].extend((0..self.list).rev());
        }
        self.active.fill(false);
        self.metric.fill(0.0);
        self.active[0] = true;
        for d in 1..=self.t {
            let a = self.free[d].pop().expect("pool has L arrays");
            self.refcount[d][a] = 1;
            self.owner[d][0] = a;
        }
    }

    /// Makes the array of `path` at depth `d` exclusively owned, copying the
    /// partial sums if it was shared. LLRs are always recomputed before they
    /// are read, so they are not copied.
    #[inline]
    fn writable(&mut self, d: usize, path: usize) -> usize {
        let a = self.owner[d][path];
        if self.refcount[d][a] == 1 {
            return a;
        }
        let fresh = self.free[d]
            .pop()
            .expect("at most L arrays are live per depth");
        let span = 2 * (self.big_n >> d);
        self.bit_pool[d].copy_within(a * span..(a + 1) * span, fresh * span);
        self.refcount[d][a] -= 1;
        self.refcount[d][fresh] = 1;
        self.owner[d][path] = fresh;
        fresh
    }

    fn clone_path(&mut self, from: usize) -> usize {
        let to = self
            .active
            .iter()
            .position(|a| !a)
            .expect("clone requested with a full list");
        self.active[to] = true;
        self.metric[to] = self.metric[from];
        for d in 1..=self.t {
            let a = self.owner[d][from];
            self.owner[d][to] = a;
            self.refcount[d][a] += 1;
        }
        to
    }

    fn kill_path(&mut self, path: usize) {
        self.active[path] = false;
        for d in 1..=self.t {
            let a = self.owner[d][path];
            self.refcount[d][a] -= 1;
            if self.refcount[d][a] == 0 {
                self.free[d].push(a);
            }
        }
    }

    #[inline]
    fn calc_llr(&mut self, path: usize, phi: usize) {
        let t = self.t;
        let start = if phi == 0 {
            1
        } else {
            t - phi.trailing_zeros() as usize
        };
        for d in start..=t {
            let s = self.big_n >> d;
            let dst = self.writable(d, path);
            let left_child = (phi >> (t - d)) & 1 == 0;
            let (upper, lower) = self.llr_pool.split_at_mut(d);
            let out = &mut lower[0][dst * s..(dst + 1) * s];
            let parent: &[f64] = if d == 1 {
                &self.channel
            } else {
                let p = self.owner[d - 1][path];
                &upper[d - 1][p * 2 * s..(p + 1) * 2 * s]
            };
            let (pa, pb) = parent.split_at(s);
            if left_child {
                match self.kernel {
                    Kernel::MinSum => {
                        for ((o, &a), &b) in out.iter_mut().zip(pa).zip(pb) {
                            *o = Kernel::MinSum.f(a, b);
                        }
                    }
                    Kernel::Exact => {
                        for ((o, &a), &b) in out.iter_mut().zip(pa).zip(pb) {
                            *o = Kernel::Exact.f(a, b);
                        }
                    }
                }
            } else {
                let sums = &self.bit_pool[d][dst * 2 * s..dst * 2 * s + s];
                for (((o, &a), &b), &v) in out.iter_mut().zip(pa).zip(pb).zip(sums) {
                    *o = g(a, b, v);
                }
            }
        }
    }

    #[inline]
    fn leaf_llr(&self, path: usize) -> f64 {
        if self.t == 0 {
            self.channel[0]
        } else {
            self.llr_pool[self.t][self.owner[self.t][path]]
        }
    }

    #[inline]
    fn set_leaf(&mut self, path: usize, phi: usize, bit: u8) {
        if self.t == 0 {
            return;
        }
        let a = self.writable(self.t, path);
        self.bit_pool[self.t][2 * a + (phi & 1)] = bit;
        if phi & 1 == 1 {
            self.propagate_sums(path, phi);
        }
    }

    #[inline]
    fn propagate_sums(&mut self, path: usize, phi: usize) {
        let mut d = self.t;
        let mut phase = phi;
        while phase & 1 == 1 && d > 1 {
            let s = self.big_n >> d;
            let parent_phase = phase >> 1;
            let slot = parent_phase & 1;
            let src = self.owner[d][path];
            let dst = self.writable(d - 1, path);
            let (upper, lower) = self.bit_pool.split_at_mut(d);
            let child = &lower[0][src * 2 * s..(src + 1) * 2 * s];
            let (left, right) = child.split_at(s);
            let base = dst * 4 * s + slot * 2 * s;
            let out = &mut upper[d - 1][base..base + 2 * s];
            let (out_a, out_b) = out.split_at_mut(s);
            for i in 0..s {
                out_a[i] = left[i] ^ right[i];
                out_b[i] = right[i];
            }
            d -= 1;
            phase = parent_phase;
        }
    }

    fn backtrack(&self, mut path: usize) -> Vec<u8> {
        let mut u = vec![0u8; self.big_n];
        for phi in (0..self.big_n).rev() {
            let at = phi * self.list + path;
            u[phi] = self.bit_hist[at];
            path = self.parent_hist[at] as usize;
        }
        u
    }

    /// Decodes `llr` (x positions `[0, n)`) under `frozen`.
    ///
    /// Among the final list, the best-metric path whose decoded prefix passes
    /// `crc` is returned; when none passes, the best-metric path is returned
    /// with `crc_ok = false`. With `L = 1` and no CRC this is SC decoding.
    pub fn decode(
        &mut self,
        llr: &LlrVector,
        frozen: &[Option<u8>],
        crc: Option<(&CrcSpec, &[u8])>,
    ) -> Result<SclOutput> {
        if frozen.len() != self.big_n {
            return Err(Error::LengthMismatch {
                expected: self.big_n,
                actual: frozen.len(),
            });
        }
        self.channel = prepare_channel(llr, frozen)?;
        self.reset();
        let l = self.list;
        let kernel = self.kernel;
        // (metric, path, disagrees-with-hard-decision, bit)
        let mut candidates: Vec<(f64, usize, bool, u8)> = Vec::with_capacity(2 * l);
        let mut keep = vec![[false; 2]; l];
        let mut assignments: Vec<(usize, usize, u8, f64)> = Vec::with_capacity(2 * l);

        for phi in 0..self.big_n {
            for path in 0..l {
                if self.active[path] {
                    self.calc_llr(path, phi);
                }
            }
            let row = phi * l;
            if let Some(bit) = frozen[phi] {
                for path in 0..l {
                    if self.active[path] {
                        let lam = self.leaf_llr(path);
                        self.metric[path] += penalty(kernel, lam, bit);
                        self.set_leaf(path, phi, bit);
                        self.bit_hist[row + path] = bit;
                        self.parent_hist[row + path] = path as u16;
                    }
                }
                continue;
            }

            candidates.clear();
            for path in 0..l {
                if self.active[path] {
                    let lam = self.leaf_llr(path);
                    for bit in 0..2u8 {
                        let m = self.metric[path] + penalty(kernel, lam, bit);
                        candidates.push((m, path, bit != hard(lam), bit));
                    }
                }
            }
            if candidates.len() > l {
                // The L best under a strict total order; rounded penalties can
                // tie, in which case the hard decision wins as in SC.
                candidates.select_nth_unstable_by(l - 1, |a, b| {
                    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
                });
                candidates.truncate(l);
            }
            for k in keep.iter_mut() {
                *k = [false; 2];
            }
            for &(_, path, _, bit) in &candidates {
                keep[path][bit as usize] = true;
            }
            for (path, k) in keep.iter().enumerate() {
                if self.active[path] && !k[0] && !k[1] {
                    self.kill_path(path);
                }
            }
            assignments.clear();
            for path in 0..l {
                if !self.active[path] {
                    continue;
                }
                let lam = self.leaf_llr(path);
                let base = self.metric[path];
                match keep[path] {
                    [true, true] => {
                        assignments.push((path, path, 0, base + penalty(kernel, lam, 0)));
                        assignments.push((usize::MAX, path, 1, base + penalty(kernel, lam, 1)));
                    }
                    [true, false] => {
                        assignments.push((path, path, 0, base + penalty(kernel, lam, 0)))
                    }
                    [false, true] => {
                        assignments.push((path, path, 1, base + penalty(kernel, lam, 1)))
                    }
                    [false, false] => unreachable!("dead paths were removed"),
                }
            }
            for &(slot, parent, bit, m) in &assignments {
                let slot = if slot == usize::MAX {
                    self.clone_path(parent)
                } else {
                    slot
                };
                self.metric[slot] = m;
                self.set_leaf(slot, phi, bit);
                self.bit_hist[row + slot] = bit;
                self.parent_hist[row + slot] = parent as u16;
            }
        }

        let mut finals: Vec<(f64, usize)> = (0..l)
            .filter(|&p| self.active[p])
            .map(|p| (self.metric[p], p))
            .collect();
        finals.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let list_metrics: Vec<f64> = finals.iter().map(|f| f.0).collect();
        let n = llr.len();

        let mut best: Option<(Vec<u8>, Vec<u8>, f64)> = None;
        for &(m, path) in &finals {
            let u = self.backtrack(path);
            let mut x = u.clone();
            polar_transform_in_place(&mut x)?;
            x.truncate(n);
            let pass = crc.is_none_or(|(spec, value)| spec.check(&x, value));
            if pass {
                return Ok(SclOutput {
                    x,
                    u,
                    crc_ok: true,
                    metric: m,
                    list_metrics,
                });
            }
            if best.is_none() {
                best = Some((x, u, m));
            }
        }
        let (x, u, metric) = best.expect("at least one path survives");
        Ok(SclOutput {
            x,
            u,
            crc_ok: false,
            metric,
            list_metrics,
        })
    }
}
