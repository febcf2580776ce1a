use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use log::{debug, info};

use super::ga::{bhattacharyya_from_mean, ga_evolve, ChannelParam, GaState};
use crate::polar::NestedChain;
use crate::{Error, Result};

/// Ordering of the `u` positions `[0, n)` from least to most reliable. The
/// frozen set of the `(n, k)` code of a chain is the first `n - k` entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReliabilitySequence {
    indices: Vec<usize>,
}

impl ReliabilitySequence {
    /// Validates that `indices` is a permutation of `[0, n)`.
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        let n = indices.len();
        let mut seen = vec![false; n];
        for &i in &indices {
            if i >= n || seen[i] {
                return Err(Error::invalid(format!(
                    "reliability sequence is not a permutation of [0, {n})"
                )));
            }
            seen[i] = true;
        }
        Ok(ReliabilitySequence { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Frozen `u` positions of the code with dimension `k` (shortened
    /// positions excluded).
    pub fn frozen_set(&self, k: usize) -> &[usize] {
        &self.indices[..self.len() - k]
    }

    /// Frozen sets along a chain must grow monotonically.
    pub fn is_nested_for(&self, chain: &NestedChain) -> bool {
        chain.len() == self.len()
            && chain.dims().windows(2).all(|w| {
                let small = self.frozen_set(w[0]);
                let large = self.frozen_set(w[1]);
                large.len() > small.len() && large[..small.len()] == *small
            })
    }
}

/// Parameters of the reliability-sequence search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstructionParams {
    /// Target Bhattacharyya parameter `T ∈ (0, 1)`.
    pub target: f64,
    /// Half-width `ε ∈ [0, T)` of the acceptance window.
    pub eps: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub max_iterations: usize,
}

impl ConstructionParams {
    pub fn new(target: f64, eps: f64) -> Result<Self> {
        if !(target > 0.0 && target < 1.0) {
            return Err(Error::invalid(format!("T = {target} not in (0, 1)")));
        }
        if !(eps >= 0.0 && eps < target) {
            return Err(Error::invalid(format!("eps = {eps} not in [0, T)")));
        }
        Ok(ConstructionParams {
            target,
            eps,
            sigma_min: 1e-3,
            sigma_max: 1e3,
            max_iterations: 200,
        })
    }

    fn window(&self) -> (f64, f64) {
        (self.target - self.eps, self.target + self.eps)
    }
}

/// Largest mean (smallest Z) among positions not yet placed; ties go to the
/// smallest index.
fn best_remaining(state: &GaState, used: &[bool]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (j, &m) in state.means[..used.len()].iter().enumerate() {
        if !used[j] && best.is_none_or(|(_, bm)| m > bm) {
            best = Some((j, m));
        }
    }
    best
}

struct Search<'a> {
    params: &'a ConstructionParams,
    n: usize,
    mother_len: usize,
    evaluations: usize,
}

impl Search<'_> {
    fn min_z(&mut self, sigma: f64, used: &[bool]) -> Result<(GaState, f64)> {
        self.evaluations += 1;
        let state = ga_evolve(ChannelParam::new(sigma)?, self.n, self.mother_len)?;
        let (_, m) = best_remaining(&state, used).expect("remaining set is non-empty");
        Ok((state, bhattacharyya_from_mean(m)))
    }

    /// σ whose best remaining subchannel has `Z ∈ [T - ε, T + ε]`.
    ///
    /// min-Z is non-decreasing in σ, so the bracket is expanded
    /// geometrically from `start` and then bisected in log σ.
    fn locate(&mut self, start: f64, used: &[bool]) -> Result<(f64, GaState)> {
        let (lo_z, hi_z) = self.params.window();
        let inside = |z: f64| z >= lo_z && z <= hi_z;
        let (state, z) = self.min_z(start, used)?;
        if inside(z) {
            return Ok((start, state));
        }
        let mut iterations = 0;
        // The previous step's σ is usually close, so the geometric expansion
        // starts with a small ratio and doubles its exponent each time.
        let mut ratio = 1.01f64;
        let (mut lo, mut hi) = (start, start);
        if z < lo_z {
            loop {
                hi *= ratio;
                ratio *= ratio;
                iterations += 1;
                if hi > self.params.sigma_max {
                    return Err(Error::Bracket(format!(
                        "min Z stays below {lo_z} up to sigma = {}",
                        self.params.sigma_max
                    )));
                }
                let (state, z) = self.min_z(hi, used)?;
                if inside(z) {
                    return Ok((hi, state));
                }
                if z > hi_z {
                    break;
                }
                lo = hi;
            }
        } else {
            loop {
                lo /= ratio;
                ratio *= ratio;
                iterations += 1;
                if lo < self.params.sigma_min {
                    return Err(Error::Bracket(format!(
                        "min Z stays above {hi_z} down to sigma = {}",
                        self.params.sigma_min
                    )));
                }
                let (state, z) = self.min_z(lo, used)?;
                if inside(z) {
                    return Ok((lo, state));
                }
                if z < lo_z {
                    break;
                }
                hi = lo;
            }
        }
        while iterations < self.params.max_iterations {
            iterations += 1;
            let mid = (lo * hi).sqrt();
            let (state, z) = self.min_z(mid, used)?;
            if inside(z) || mid <= lo || mid >= hi {
                // A collapsed bracket only happens with ε = 0.
                return Ok((mid, state));
            }
            if z < lo_z {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::Bracket(format!(
            "no sigma in [{lo}, {hi}] reached the window after {} iterations",
            self.params.max_iterations
        )))
    }
}

/// Per-step record of a sequence construction.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConstructionTrace {
    /// σ at which step `i` picked its index.
    pub sigmas: Vec<f64>,
    /// Smallest remaining Bhattacharyya parameter at that σ.
    pub min_z: Vec<f64>,
    pub ga_evaluations: usize,
}

/// Builds the degradation-ordered reliability sequence of a length-`n`
/// shortened polar code.
///
/// For `i = 0..n`: choose σ such that the smallest Bhattacharyya parameter
/// among unplaced `u` positions lies in `[T - ε, T + ε]`, then place that
/// position at `R[n - i - 1]`. Shortened positions `[n, N)` never enter the
/// sequence.
pub fn build_reliability_sequence(
    n: usize,
    params: &ConstructionParams,
) -> Result<ReliabilitySequence> {
    build_with_trace(n, params).map(|(seq, _)| seq)
}

/// [`build_reliability_sequence`] that also reports the σ used at each step.
pub fn build_with_trace(
    n: usize,
    params: &ConstructionParams,
) -> Result<(ReliabilitySequence, ConstructionTrace)> {
    if n == 0 {
        return Err(Error::invalid("code length must be positive"));
    }
    let mother_len = n.next_power_of_two();
    let mut search = Search {
        params,
        n,
        mother_len,
        evaluations: 0,
    };
    let mut used = vec![false; n];
    let mut sequence = vec![0usize; n];
    let mut trace = ConstructionTrace::default();
    let mut sigma = 1.0;
    let mut state = ga_evolve(ChannelParam::new(sigma)?, n, mother_len)?;
    let (lo_z, hi_z) = params.window();
    for i in 0..n {
        let (_, m) = best_remaining(&state, &used).expect("non-empty");
        if !(lo_z..=hi_z).contains(&bhattacharyya_from_mean(m)) {
            let (s, st) = search.locate(sigma, &used)?;
            sigma = s;
            state = st;
        }
        let (j, m) = best_remaining(&state, &used).expect("non-empty");
        sequence[n - i - 1] = j;
        used[j] = true;
        trace.sigmas.push(sigma);
        trace.min_z.push(bhattacharyya_from_mean(m));
    }
    trace.ga_evaluations = search.evaluations + 1;
    debug!(
        "reliability sequence n={n}: {} GA evaluations, final sigma {sigma:.4}",
        trace.ga_evaluations
    );
    Ok((ReliabilitySequence::new(sequence)?, trace))
}

/// Largest `Z[R[i+1]] - Z[R[i]]` under GA at `sigma` (0 when the sequence
/// is Z-ordered at that channel), with the offending position `i`.
pub fn ordering_violation(
    seq: &ReliabilitySequence,
    sigma: ChannelParam,
) -> Result<(f64, Option<usize>)> {
    let n = seq.len();
    let z = ga_evolve(sigma, n, n.next_power_of_two())?.bhattacharyya();
    let r = seq.indices();
    let mut worst = (0.0, None);
    for i in 0..n.saturating_sub(1) {
        let v = z[r[i + 1]] - z[r[i]];
        if v > worst.0 {
            worst = (v, Some(i));
        }
    }
    Ok(worst)
}

/// Header of a reliability-sequence file: `n T eps N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SequenceHeader {
    pub n: usize,
    pub target: f64,
    pub eps: f64,
    pub mother_len: usize,
}

/// Plain-text sequence file: a header line `n T eps N` followed by one
/// `u` index per line in sequence order.
pub fn write_sequence_file(
    path: &Path,
    header: &SequenceHeader,
    seq: &ReliabilitySequence,
) -> Result<()> {
    let mut text = format!(
        "{} {} {} {}\n",
        header.n, header.target, header.eps, header.mother_len
    );
    for i in seq.indices() {
        writeln!(text, "{i}").expect("writing to a String");
    }
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_sequence_file(path: &Path) -> Result<(SequenceHeader, ReliabilitySequence)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |detail: String| Error::Format {
        what: "reliability sequence file",
        detail,
    };
    let mut lines = text.lines();
    let head: Vec<&str> = lines
        .next()
        .ok_or_else(|| bad("empty file".into()))?
        .split_whitespace()
        .collect();
    if head.len() != 4 {
        return Err(bad(format!("header needs 4 fields, got {}", head.len())));
    }
    let parse_err = |e: &dyn std::fmt::Display| bad(format!("header: {e}"));
    let header = SequenceHeader {
        n: head[0].parse().map_err(|e| parse_err(&e))?,
        target: head[1].parse().map_err(|e| parse_err(&e))?,
        eps: head[2].parse().map_err(|e| parse_err(&e))?,
        mother_len: head[3].parse().map_err(|e| parse_err(&e))?,
    };
    let indices = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.trim()
                .parse::<usize>()
                .map_err(|e| bad(format!("index {l:?}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if indices.len() != header.n {
        return Err(bad(format!(
            "expected {} indices, found {}",
            header.n,
            indices.len()
        )));
    }
    if header.mother_len != header.n.next_power_of_two() {
        return Err(bad(format!(
            "N = {} does not match n = {}",
            header.mother_len, header.n
        )));
    }
    Ok((header, ReliabilitySequence::new(indices)?))
}

/// Cache file name for `(n, T, ε)`.
pub fn cache_path(dir: &Path, n: usize, params: &ConstructionParams) -> PathBuf {
    dir.join(format!(
        "reliability_n{n}_T{}_eps{}.txt",
        params.target, params.eps
    ))
}

/// Reads the cached sequence for `(n, T, ε)` from `dir`, building and storing
/// it when absent.
pub fn load_or_build(
    dir: &Path,
    n: usize,
    params: &ConstructionParams,
) -> Result<ReliabilitySequence> {
    let path = cache_path(dir, n, params);
    if path.exists() {
        let (header, seq) = read_sequence_file(&path)?;
        if header.n == n && header.target == params.target && header.eps == params.eps {
            return Ok(seq);
        }
    }
    info!(
        "building reliability sequence for n = {n} into {}",
        path.display()
    );
    let seq = build_reliability_sequence(n, params)?;
    let header = SequenceHeader {
        n,
        target: params.target,
        eps: params.eps,
        mother_len: n.next_power_of_two(),
    };
    write_sequence_file(&path, &header, &seq)?;
    Ok(seq)
}
