//! Syndrome-conditioned sum-product decoding (flooding schedule).

/// Messages are clamped to `±MESSAGE_CLAMP`.
pub const MESSAGE_CLAMP: f64 = 25.0;
/// Consecutive identical unsatisfied hard decisions that end decoding.
pub const STALL_LIMIT: usize = 5;

/// Parity checks `⊕ x[vars] = syndrome` over `n` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckSet {
    pub n: usize,
    pub checks: Vec<Vec<usize>>,
    pub syndrome: Vec<u8>,
}

impl CheckSet {
    pub fn satisfied_by(&self, x: &[u8]) -> bool {
        self.checks
            .iter()
            .zip(&self.syndrome)
            .all(|(vars, &s)| vars.iter().fold(0u8, |acc, &v| acc ^ x[v]) == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BpStop {
    Satisfied,
    /// The hard decisions repeated without satisfying the checks.
    Stalled,
    MaxIterations,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BpOutput {
    pub bits: Vec<u8>,
    pub iterations: usize,
    pub stop: BpStop,
}

impl BpOutput {
    pub fn success(&self) -> bool {
        self.stop == BpStop::Satisfied
    }
}

/// Belief propagation for `checks` with channel LLRs `llr`
/// (`log P(0)/P(1)`).
pub fn bp_decode(llr: &[f64], checks: &CheckSet, max_iterations: usize) -> BpOutput {
    let n = checks.n;
    assert_eq!(llr.len(), n);
    // Edge layout: check-major.
    let mut offsets = Vec::with_capacity(checks.checks.len() + 1);
    offsets.push(0);
    for vars in &checks.checks {
        offsets.push(offsets.last().unwrap() + vars.len());
    }
    let edge_var: Vec<usize> = checks.checks.iter().flatten().copied().collect();
    let edges = edge_var.len();
    let channel: Vec<f64> = llr.iter().map(|l| l.clamp(-MESSAGE_CLAMP, MESSAGE_CLAMP)).collect();
    let mut v2c: Vec<f64> = edge_var.iter().map(|&v| channel[v]).collect();
    let mut c2v = vec![0.0; edges];
    let mut posterior = channel.clone();
    let mut hard: Vec<u8> = posterior.iter().map(|&p| u8::from(p < 0.0)).collect();
    let mut previous: Option<Vec<u8>> = None;
    let mut repeats = 0;
    let mut tanh_buf = Vec::new();

    if checks.satisfied_by(&hard) {
        return BpOutput {
            bits: hard,
            iterations: 0,
            stop: BpStop::Satisfied,
        };
    }
    for it in 1..=max_iterations {
        // Check update with leave-one-out products.
        for (c, &s) in checks.syndrome.iter().enumerate() {
            let (a, b) = (offsets[c], offsets[c + 1]);
            let deg = b - a;
            if deg == 0 {
                continue;
            }
            tanh_buf.clear();
            tanh_buf.extend(v2c[a..b].iter().map(|&m| (m / 2.0).tanh()));
            let sign = if s == 1 { -1.0 } else { 1.0 };
            let mut prefix = 1.0;
            for k in 0..deg {
                c2v[a + k] = prefix;
                prefix *= tanh_buf[k];
            }
            let mut suffix = 1.0;
            for k in (0..deg).rev() {
                let p = (sign * c2v[a + k] * suffix).clamp(-1.0 + 1e-15, 1.0 - 1e-15);
                c2v[a + k] = (2.0 * p.atanh()).clamp(-MESSAGE_CLAMP, MESSAGE_CLAMP);
                suffix *= tanh_buf[k];
            }
        }
        posterior.copy_from_slice(&channel);
        for (e, &v) in edge_var.iter().enumerate() {
            posterior[v] += c2v[e];
        }
        for (e, &v) in edge_var.iter().enumerate() {
            v2c[e] = (posterior[v] - c2v[e]).clamp(-MESSAGE_CLAMP, MESSAGE_CLAMP);
        }
        for (h, &p) in hard.iter_mut().zip(&posterior) {
            *h = u8::from(p < 0.0);
        }
        if checks.satisfied_by(&hard) {
            return BpOutput {
                bits: hard,
                iterations: it,
                stop: BpStop::Satisfied,
            };
        }
        if previous.as_deref() == Some(&hard[..]) {
            repeats += 1;
        } else {
            repeats = 1;
            previous = Some(hard.clone());
        }
        if repeats >= STALL_LIMIT {
            return BpOutput {
                bits: hard,
                iterations: it,
                stop: BpStop::Stalled,
            };
        }
    }
    BpOutput {
        bits: hard,
        iterations: max_iterations,
        stop: BpStop::MaxIterations,
    }
}
