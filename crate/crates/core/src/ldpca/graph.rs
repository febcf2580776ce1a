//! Seeded regular degree-3 base graphs.
//!
//! Variables are connected one at a time to three distinct checks, drawn
//! from a ChaCha8 stream with probability proportional to the check's free
//! sockets. Checks that would close a 4-cycle are avoided while any other
//! choice exists. Every check ends with degree 3 (the graph is square).
//!
//! Filling checks strictly by load is tempting but makes each round of
//! `n / 3` variables cover every check exactly once, so any two rounds sum
//! to zero and the matrix is always rank deficient.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

pub const VARIABLE_DEGREE: usize = 3;

/// Bipartite graph with `n` variables and `n` checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseGraph {
    pub n: usize,
    pub seed: u64,
    /// Checks of every variable, ascending.
    pub var_checks: Vec<[usize; VARIABLE_DEGREE]>,
}

impl BaseGraph {
    /// One generation attempt; `None` when the greedy fill gets stuck.
    pub fn generate(n: usize, seed: u64) -> Option<Self> {
        if n < VARIABLE_DEGREE {
            return None;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut check_vars: Vec<Vec<usize>> = vec![Vec::with_capacity(VARIABLE_DEGREE); n];
        let mut var_checks = Vec::with_capacity(n);
        let mut candidates = Vec::with_capacity(n);
        for v in 0..n {
            let mut chosen: Vec<usize> = Vec::with_capacity(VARIABLE_DEGREE);
            for _ in 0..VARIABLE_DEGREE {
                // Variables already sharing a check with v.
                let neighbours: Vec<usize> = chosen.iter().flat_map(|&c| check_vars[c].iter().copied()).collect();
                let mut pick = None;
                for avoid_cycles in [true, false] {
                    candidates.clear();
                    for (c, vars) in check_vars.iter().enumerate() {
                        if vars.len() >= VARIABLE_DEGREE || chosen.contains(&c) {
                            continue;
                        }
                        if avoid_cycles && vars.iter().any(|w| neighbours.contains(w)) {
                            continue;
                        }
                        // One entry per free socket.
                        for _ in vars.len()..VARIABLE_DEGREE {
                            candidates.push(c);
                        }
                    }
                    if let Some(&c) = candidates.choose(&mut rng) {
                        pick = Some(c);
                        break;
                    }
                }
                let c = pick?;
                chosen.push(c);
                check_vars[c].push(v);
            }
            chosen.sort_unstable();
            var_checks.push([chosen[0], chosen[1], chosen[2]]);
        }
        Some(BaseGraph { n, seed, var_checks })
    }

    /// Variables of every check.
    pub fn check_vars(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::with_capacity(VARIABLE_DEGREE); self.n];
        for (v, cs) in self.var_checks.iter().enumerate() {
            for &c in cs {
                out[c].push(v);
            }
        }
        out
    }

    /// Number of variable pairs that share two or more checks.
    pub fn four_cycles(&self) -> usize {
        let checks = self.check_vars();
        let mut count = 0;
        for (v, cs) in self.var_checks.iter().enumerate() {
            let mut seen: Vec<usize> = cs.iter().flat_map(|&c| checks[c].iter().copied()).filter(|&w| w > v).collect();
            seen.sort_unstable();
            count += seen.windows(2).filter(|w| w[0] == w[1]).count();
        }
        count
    }

    /// Base syndrome `H b`.
    pub fn syndrome(&self, bits: &[u8]) -> Vec<u8> {
        let mut s = vec![0u8; self.n];
        for (v, cs) in self.var_checks.iter().enumerate() {
            if bits[v] & 1 == 1 {
                for &c in cs {
                    s[c] ^= 1;
                }
            }
        }
        s
    }

    /// Text form: a header line `ldpca <n> <seed>` followed by the three
    /// check indices of each variable.
    pub fn to_text(&self) -> String {
        let mut out = format!("ldpca {} {}\n", self.n, self.seed);
        for cs in &self.var_checks {
            writeln!(out, "{} {} {}", cs[0], cs[1], cs[2]).expect("writing to a String");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |detail: String| Error::Format {
            what: "LDPCA graph file",
            detail,
        };
        let mut lines = text.lines();
        let head: Vec<&str> = lines.next().unwrap_or("").split_whitespace().collect();
        if head.len() != 3 || head[0] != "ldpca" {
            return Err(bad("header must be `ldpca <n> <seed>`".into()));
        }
        let n: usize = head[1].parse().map_err(|e| bad(format!("n: {e}")))?;
        let seed: u64 = head[2].parse().map_err(|e| bad(format!("seed: {e}")))?;
        let mut var_checks = Vec::with_capacity(n);
        for (i, line) in lines.filter(|l| !l.trim().is_empty()).enumerate() {
            let cs: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|e| bad(format!("variable {i}: {e}"))))
                .collect::<Result<_>>()?;
            if cs.len() != VARIABLE_DEGREE || cs.iter().any(|&c| c >= n) {
                return Err(bad(format!("variable {i}: expected {VARIABLE_DEGREE} checks below {n}")));
            }
            var_checks.push([cs[0], cs[1], cs[2]]);
        }
        if var_checks.len() != n {
            return Err(bad(format!("expected {n} variables, found {}", var_checks.len())));
        }
        Ok(BaseGraph { n, seed, var_checks })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_and_cycle_free() {
        let mut made = 0;
        for seed in 0..20 {
            let Some(g) = BaseGraph::generate(396, seed) else { continue };
            made += 1;
            for cs in &g.var_checks {
                assert!(cs[0] < cs[1] && cs[1] < cs[2]);
            }
            assert!(g.check_vars().iter().all(|vs| vs.len() == 3));
            assert_eq!(g.four_cycles(), 0, "seed {seed}");
        }
        assert!(made > 0);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = BaseGraph::generate(200, 9);
        let b = BaseGraph::generate(200, 9);
        assert_eq!(a, b);
        assert_ne!(a, BaseGraph::generate(200, 10));
    }

    #[test]
    fn text_roundtrip_and_validation() {
        let g = (0..).find_map(|s| BaseGraph::generate(60, s)).unwrap();
        assert_eq!(BaseGraph::from_text(&g.to_text()).unwrap(), g);
        assert!(BaseGraph::from_text("ldpca 2 0\n0 1 1\n").is_err());
        assert!(BaseGraph::from_text("ldpc 3 0\n").is_err());
        assert!(BaseGraph::from_text("ldpca 3 0\n0 1 2\n0 1 2\n").is_err());
        assert!(BaseGraph::from_text("ldpca 3 0\n0 1 9\n0 1 2\n0 1 2\n").is_err());
    }

    #[test]
    fn syndrome_is_linear() {
        let g = (0..).find_map(|s| BaseGraph::generate(50, s)).unwrap();
        let a: Vec<u8> = (0..50).map(|i| (i % 3 == 0) as u8).collect();
        let b: Vec<u8> = (0..50).map(|i| (i % 5 == 1) as u8).collect();
        let ab = crate::bits::xor(&a, &b);
        assert_eq!(g.syndrome(&ab), crate::bits::xor(&g.syndrome(&a), &g.syndrome(&b)));
        assert!(g.syndrome(&[0; 50]).iter().all(|&x| x == 0));
    }
}
