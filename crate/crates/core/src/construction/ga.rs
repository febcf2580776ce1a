use super::phi::{ln_phi, phi_inv_ln};
use crate::{Error, Result};

/// Noise standard deviation of a BPSK (±1) AWGN channel. Larger σ means a
/// degraded channel.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct ChannelParam(f64);

impl ChannelParam {
    pub fn new(sigma: f64) -> Result<Self> {
        if sigma.is_finite() && sigma > 0.0 {
            Ok(ChannelParam(sigma))
        } else {
            Err(Error::invalid(format!(
                "sigma must be positive, got {sigma}"
            )))
        }
    }

    pub fn sigma(self) -> f64 {
        self.0
    }

    /// Mean of the channel LLR, `2 / σ²`.
    pub fn llr_mean(self) -> f64 {
        2.0 / (self.0 * self.0)
    }
}

/// Per-`u`-index mean of the (Gaussian) LLR; `∞` marks known positions.
#[derive(Clone, Debug, PartialEq)]
pub struct GaState {
    pub means: Vec<f64>,
}

impl GaState {
    pub fn bhattacharyya(&self) -> Vec<f64> {
        self.means
            .iter()
            .map(|&m| bhattacharyya_from_mean(m))
            .collect()
    }
}

/// `Z = exp(-m/4)`, exact for a Gaussian LLR with mean `m` and variance `2m`.
///
/// # Panics
/// On negative or NaN `m`.
pub fn bhattacharyya_from_mean(m: f64) -> f64 {
    assert!(m >= 0.0, "LLR mean must be non-negative, got {m}");
    (-m / 4.0).exp()
}

#[inline]
fn check_combine(a: f64, b: f64) -> f64 {
    if a.is_infinite() {
        return b;
    }
    if b.is_infinite() {
        return a;
    }
    // 1 - (1 - φa)(1 - φb) = φa + φb - φa φb, in the log domain.
    let (la, lb) = (ln_phi(a), ln_phi(b));
    let (hi, lo) = if la >= lb { (la, lb) } else { (lb, la) };
    let ln_y = hi + ((lo - hi).exp() - lo.exp()).ln_1p();
    phi_inv_ln(ln_y)
}

/// Gaussian-approximation density evolution of the shortened code.
///
/// The channel mean `2/σ²` is assigned to active `x` positions `[0, n)` and
/// `∞` to shortened ones; each butterfly level maps `(a, b)` to
/// `(φ⁻¹(1 - (1-φ(a))(1-φ(b))), a + b)`. The result is indexed by `u`.
pub fn ga_evolve(sigma: ChannelParam, n: usize, mother_len: usize) -> Result<GaState> {
    if !mother_len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(mother_len));
    }
    if n > mother_len {
        return Err(Error::invalid(format!("n = {n} exceeds N = {mother_len}")));
    }
    let mut means = vec![f64::INFINITY; mother_len];
    means[..n].fill(sigma.llr_mean());
    let mut half = mother_len / 2;
    // Inputs repeat heavily (all active positions start equal), so reuse the
    // last check-combine result when the operands match.
    let mut last = (f64::NAN, f64::NAN, f64::NAN);
    while half >= 1 {
        for block in means.chunks_exact_mut(2 * half) {
            let (upper, lower) = block.split_at_mut(half);
            for (a, b) in upper.iter_mut().zip(lower.iter_mut()) {
                let (x, y) = (*a, *b);
                if x != last.0 || y != last.1 {
                    last = (x, y, check_combine(x, y));
                }
                *a = last.2;
                *b = x + y;
            }
        }
        half /= 2;
    }
    Ok(GaState { means })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegradationReport {
    /// `max_i (Z_i(σ2) - Z_i(σ1))`, clamped at 0.
    pub max_violation: f64,
    pub worst_index: Option<usize>,
}

/// Checks that every subchannel of the worse channel `σ1` has a Bhattacharyya
/// parameter at least as large as under the better channel `σ2`.
pub fn degradation_check(
    sigma1: ChannelParam,
    sigma2: ChannelParam,
    n: usize,
    mother_len: usize,
) -> Result<DegradationReport> {
    if sigma1 < sigma2 {
        return Err(Error::invalid("degradation check needs sigma1 >= sigma2"));
    }
    let worse = ga_evolve(sigma1, n, mother_len)?.bhattacharyya();
    let better = ga_evolve(sigma2, n, mother_len)?.bhattacharyya();
    let mut report = DegradationReport {
        max_violation: 0.0,
        worst_index: None,
    };
    for (i, (w, b)) in worse.iter().zip(&better).enumerate() {
        let v = b - w;
        if v > report.max_violation {
            report.max_violation = v;
            report.worst_index = Some(i);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn infinite_positions(state: &GaState) -> Vec<usize> {
        (0..state.means.len())
            .filter(|&i| state.means[i].is_infinite())
            .collect()
    }

    fn sigma(s: f64) -> ChannelParam {
        ChannelParam::new(s).unwrap()
    }

    /// φ by Simpson quadrature of the defining integral, inverted by bisection.
    fn phi_quad(m: f64) -> f64 {
        let sd = (2.0 * m).sqrt();
        let (lo, hi) = (m - 12.0 * sd, m + 12.0 * sd);
        let count = 20_000;
        let h = (hi - lo) / count as f64;
        let mut acc = 0.0;
        for k in 0..=count {
            let u = lo + k as f64 * h;
            let w = if k == 0 || k == count {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * (u / 2.0).tanh() * (-(u - m) * (u - m) / (4.0 * m)).exp();
        }
        1.0 - acc * h / 3.0 / (4.0 * PI * m).sqrt()
    }

    fn phi_quad_inv(y: f64) -> f64 {
        let (mut lo, mut hi) = (1e-9, 200.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if phi_quad(mid) > y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn channel_param_validation() {
        assert!(ChannelParam::new(0.0).is_err());
        assert!(ChannelParam::new(-1.0).is_err());
        assert!(ChannelParam::new(f64::NAN).is_err());
        assert_eq!(sigma(0.5).llr_mean(), 8.0);
    }

    #[test]
    fn single_position() {
        let st = ga_evolve(sigma(0.7), 1, 1).unwrap();
        assert!((st.means[0] - 2.0 / 0.49).abs() < 1e-12);
    }

    #[test]
    fn fully_shortened_is_infinite() {
        let st = ga_evolve(sigma(1.0), 0, 8).unwrap();
        assert!(st.means.iter().all(|m| m.is_infinite()));
    }

    #[test]
    fn length_two_against_quadrature() {
        let st = ga_evolve(sigma(1.0), 2, 2).unwrap();
        let p = phi_quad(2.0);
        let expected0 = phi_quad_inv(1.0 - (1.0 - p) * (1.0 - p));
        assert!(
            (st.means[0] - expected0).abs() / expected0 < 1e-4,
            "{} vs {expected0}",
            st.means[0]
        );
        assert_eq!(st.means[1], 4.0);
    }

    #[test]
    fn shortened_u_positions_are_perfect() {
        for n in 1usize..=16 {
            let big_n = n.next_power_of_two();
            let st = ga_evolve(sigma(0.9), n, big_n).unwrap();
            assert_eq!(
                infinite_positions(&st),
                (n..big_n).collect::<Vec<_>>(),
                "n = {n}"
            );
        }
    }

    #[test]
    fn bhattacharyya_values() {
        assert_eq!(bhattacharyya_from_mean(0.0), 1.0);
        assert_eq!(bhattacharyya_from_mean(f64::INFINITY), 0.0);
        assert!((bhattacharyya_from_mean(4.0) - 0.367_879_441_171_442_3).abs() < 1e-15);
    }

    #[test]
    #[should_panic]
    fn negative_mean_panics() {
        bhattacharyya_from_mean(-1.0);
    }

    #[test]
    fn degradation_under_ga() {
        let same = degradation_check(sigma(1.0), sigma(1.0), 200, 256).unwrap();
        assert_eq!(same.max_violation, 0.0);
        let report = degradation_check(sigma(1.2), sigma(0.8), 256, 256).unwrap();
        assert!(report.max_violation < 1e-9, "{report:?}");
        let shortened = degradation_check(sigma(1.2), sigma(0.8), 200, 256).unwrap();
        assert!(shortened.max_violation < 1e-9);
        assert!(degradation_check(sigma(0.8), sigma(1.2), 8, 8).is_err());
    }
}
