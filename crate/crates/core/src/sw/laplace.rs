//! Laplace correlation-noise model `p(x | s) = α/2 · exp(-α |x - s|)`.

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaplaceModel {
    alpha: f64,
}

const LN_HALF: f64 = -std::f64::consts::LN_2;

impl LaplaceModel {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::invalid(format!("Laplace alpha must be positive, got {alpha}")));
        }
        Ok(LaplaceModel { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Model variance `2/α²`.
    pub fn variance(&self) -> f64 {
        2.0 / (self.alpha * self.alpha)
    }

    /// `ln P(a ≤ X < b)` for `X` centred at `s`; `-∞` for an empty interval.
    pub fn ln_mass(&self, a: f64, b: f64, s: f64) -> f64 {
        let alpha = self.alpha;
        if b <= a {
            return f64::NEG_INFINITY;
        }
        // -expm1(-αw) = 1 - e^{-αw}, accurate for small widths.
        let tail = |w: f64| {
            if w.is_infinite() {
                0.0
            } else {
                (-(-alpha * w).exp_m1()).ln()
            }
        };
        if a >= s {
            LN_HALF - alpha * (a - s) + tail(b - a)
        } else if b <= s {
            LN_HALF - alpha * (s - b) + tail(b - a)
        } else {
            let left = -(-alpha * (s - a)).exp_m1();
            let right = -(-alpha * (b - s)).exp_m1();
            LN_HALF + (left + right).ln()
        }
    }

    /// `E[X | a ≤ X < b]` for `X` centred at `s`.
    pub fn centroid(&self, a: f64, b: f64, s: f64) -> f64 {
        debug_assert!(b > a);
        if a >= s {
            a + truncated_exp_mean(self.alpha, b - a)
        } else if b <= s {
            b - truncated_exp_mean(self.alpha, b - a)
        } else {
            // Split at s and mix the two one-sided pieces by mass.
            let wl = s - a;
            let wr = b - s;
            let ml = -(-self.alpha * wl).exp_m1();
            let mr = -(-self.alpha * wr).exp_m1();
            let el = s - truncated_exp_mean(self.alpha, wl);
            let er = s + truncated_exp_mean(self.alpha, wr);
            (ml * el + mr * er) / (ml + mr)
        }
    }

    /// One correlation-noise sample (difference of two exponentials).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let exp = Exp::new(self.alpha).expect("alpha validated");
        exp.sample(rng) - exp.sample(rng)
    }
}

/// Mean of an exponential(α) variable truncated to `[0, w)`.
fn truncated_exp_mean(alpha: f64, w: f64) -> f64 {
    let r = alpha * w;
    if r < 1e-4 {
        w / 2.0 - r * w / 12.0
    } else if r > 700.0 {
        1.0 / alpha
    } else {
        1.0 / alpha - w / r.exp_m1()
    }
}

/// ML Laplace fit `α = 1 / mean|r|`, with the mean floored at `1e-3` and the
/// result clamped to `[1e-3, 1e3]`.
pub fn fit_alpha(residual: &[f64]) -> Result<f64> {
    if residual.is_empty() {
        return Err(Error::invalid("cannot fit alpha to an empty residual"));
    }
    let mean = residual.iter().map(|r| r.abs()).sum::<f64>() / residual.len() as f64;
    Ok((1.0 / mean.max(1e-3)).clamp(1e-3, 1e3))
}
