//! The Gaussian-approximation reliability function
//!
//! `φ(m) = 1 - E[tanh(L/2)]`, `L ~ N(m, 2m)`, with `φ(0) = 1` and
//! `φ(∞) = 0`.
//!
//! `ln φ` is tabulated once from the equivalent integral
//! `φ(m) = E[2 / (1 + e^L)]` (evaluated in the log domain, Simpson rule) and
//! interpolated with four-point cubics: step 0.02 on `[0, 20]`, step 0.25 on
//! `[20, 400]`. Above 400 the asymptotic expansion
//! `φ(m) ≈ sqrt(π/m) e^{-m/4} (1 - π²/(4m) + 5π⁴/(32m²))` is used.

use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

const FINE_STEP: f64 = 0.02;
const FINE_END: f64 = 20.0;
const COARSE_STEP: f64 = 0.25;
const TABLE_END: f64 = 400.0;

struct Table {
    fine: Vec<f64>,
    coarse: Vec<f64>,
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let fine_len = (FINE_END / FINE_STEP).round() as usize + 3;
        let coarse_len = ((TABLE_END - FINE_END) / COARSE_STEP).round() as usize + 3;
        // One extra point on each side keeps every cell interior to the stencil.
        let fine = (0..fine_len)
            .map(|k| ln_phi_quadrature((k as f64 - 1.0) * FINE_STEP))
            .collect();
        let coarse = (0..coarse_len)
            .map(|k| ln_phi_quadrature(FINE_END + (k as f64 - 1.0) * COARSE_STEP))
            .collect();
        Table { fine, coarse }
    })
}

fn softplus(u: f64) -> f64 {
    u.max(0.0) + (-u.abs()).exp().ln_1p()
}

/// `ln φ(m)` by direct numerical integration (slow; used to fill the table).
/// Negative `m` (only used for the stencil guard point) is mirrored by
/// a linear extrapolation from the origin.
pub(crate) fn ln_phi_quadrature(m: f64) -> f64 {
    if m <= 0.0 {
        return -0.5 * m;
    }
    let sd = (2.0 * m).sqrt();
    let lo = (m - 14.0 * sd).min(-80.0);
    let hi = m + 14.0 * sd;
    let step = (sd / 40.0).min(0.05);
    let mut count = ((hi - lo) / step).ceil() as usize;
    if count % 2 == 1 {
        count += 1;
    }
    let h = (hi - lo) / count as f64;
    let log_integrand = |u: f64| LN_2 - softplus(u) - (u - m) * (u - m) / (4.0 * m);
    let peak = (0..=count)
        .map(|k| log_integrand(lo + k as f64 * h))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut acc = 0.0;
    for k in 0..=count {
        let w = if k == 0 || k == count {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * (log_integrand(lo + k as f64 * h) - peak).exp();
    }
    peak + (acc * h / 3.0).ln() - 0.5 * (4.0 * PI * m).ln()
}

fn ln_phi_asymptotic(m: f64) -> f64 {
    let series = 1.0 - PI * PI / (4.0 * m) + 5.0 * PI.powi(4) / (32.0 * m * m);
    0.5 * (PI / m).ln() - m / 4.0 + series.ln()
}

fn ln_phi_asymptotic_derivative(m: f64) -> f64 {
    let a = PI * PI / 4.0;
    let b = 5.0 * PI.powi(4) / 32.0;
    let series = 1.0 - a / m + b / (m * m);
    -0.5 / m - 0.25 + (a / (m * m) - 2.0 * b / (m * m * m)) / series
}

/// Four-point cubic through `y[k-1..=k+2]` at local coordinate `s ∈ [0, 1]`;
/// returns value and derivative with respect to `s`.
#[inline]
fn cubic(y: &[f64], k: usize, s: f64) -> (f64, f64) {
    let (p0, p1, p2, p3) = (y[k - 1], y[k], y[k + 1], y[k + 2]);
    // Lagrange basis on nodes -1, 0, 1, 2.
    let l0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
    let l1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    let l2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
    let l3 = (s + 1.0) * s * (s - 1.0) / 6.0;
    let d0 = -(3.0 * s * s - 6.0 * s + 2.0) / 6.0;
    let d1 = (3.0 * s * s - 4.0 * s - 1.0) / 2.0;
    let d2 = -(3.0 * s * s - 2.0 * s - 2.0) / 2.0;
    let d3 = (3.0 * s * s - 1.0) / 6.0;
    (
        p0 * l0 + p1 * l1 + p2 * l2 + p3 * l3,
        p0 * d0 + p1 * d1 + p2 * d2 + p3 * d3,
    )
}

/// Table segment and local coordinates of `m`: (values, step, origin, cell, s).
fn locate(m: f64) -> (&'static [f64], f64, f64, usize, f64) {
    let tab = table();
    let (values, step, origin) = if m < FINE_END {
        (&tab.fine[..], FINE_STEP, 0.0)
    } else {
        (&tab.coarse[..], COARSE_STEP, FINE_END)
    };
    let pos = (m - origin) / step;
    let cell = (pos.floor() as usize).min(values.len() - 4);
    // +1 for the guard point at the start of each segment.
    (values, step, origin, cell + 1, pos - cell as f64)
}

/// `ln φ(m)` for `m ≥ 0`; `-∞` for `m = ∞`.
pub fn ln_phi(m: f64) -> f64 {
    if m <= 0.0 {
        0.0
    } else if m.is_infinite() {
        f64::NEG_INFINITY
    } else if m >= TABLE_END {
        ln_phi_asymptotic(m)
    } else {
        let (values, _, _, k, s) = locate(m);
        cubic(values, k, s).0.min(0.0)
    }
}

pub fn phi(m: f64) -> f64 {
    ln_phi(m).exp()
}

fn ln_phi_derivative(m: f64) -> f64 {
    if m >= TABLE_END {
        ln_phi_asymptotic_derivative(m)
    } else {
        let (values, step, _, k, s) = locate(m);
        cubic(values, k, s).1 / step
    }
}

/// Inverse of [`ln_phi`]: the mean `m ≥ 0` with `ln φ(m) = ln_y`.
pub fn phi_inv_ln(ln_y: f64) -> f64 {
    if ln_y >= 0.0 {
        return 0.0;
    }
    if ln_y == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    if ln_y < ln_phi(TABLE_END) {
        // ln φ ≈ -m/4 for large m; bracket generously.
        let guess = -4.0 * ln_y;
        let hi = guess + 4.0 * guess.ln().max(1.0) + 50.0;
        solve(ln_y, TABLE_END, hi, 0.5 * (TABLE_END + hi))
    } else {
        let (lo, hi) = bracket_in_table(ln_y);
        // Secant start inside the cell.
        let (v_lo, v_hi) = (ln_phi(lo), ln_phi(hi));
        let w = if v_lo > v_hi {
            ((v_lo - ln_y) / (v_lo - v_hi)).clamp(0.0, 1.0)
        } else {
            0.5
        };
        solve(ln_y, lo, hi, lo + w * (hi - lo))
    }
}

/// Cell `[lo, hi]` of the table whose values enclose `ln_y`.
fn bracket_in_table(ln_y: f64) -> (f64, f64) {
    let tab = table();
    let fine_end = ln_phi(FINE_END);
    let (values, step, origin) = if ln_y > fine_end {
        (&tab.fine[..], FINE_STEP, 0.0)
    } else {
        (&tab.coarse[..], COARSE_STEP, FINE_END)
    };
    // values[k + 1] = ln φ(origin + k step), strictly decreasing.
    let inner = &values[1..values.len() - 2];
    let idx = inner.partition_point(|&v| v > ln_y);
    let k = idx.saturating_sub(1);
    (origin + k as f64 * step, origin + (k + 1) as f64 * step)
}

/// Safeguarded Newton iteration for `ln_phi(m) = ln_y` on `[lo, hi]`.
fn solve(ln_y: f64, mut lo: f64, mut hi: f64, start: f64) -> f64 {
    let mut m = start;
    for _ in 0..100 {
        let f = ln_phi(m) - ln_y;
        if f > 0.0 {
            lo = m;
        } else {
            hi = m;
        }
        let d = ln_phi_derivative(m);
        let mut next = m - f / d;
        if !(next > lo && next < hi) || d >= 0.0 {
            next = 0.5 * (lo + hi);
        }
        if (next - m).abs() <= 1e-13 * m.max(1.0) || hi - lo <= 1e-13 * m.max(1.0) {
            return next;
        }
        m = next;
    }
    m
}

/// Inverse of [`phi`] on `[0, 1]`.
pub fn phi_inv(y: f64) -> f64 {
    if y >= 1.0 {
        0.0
    } else if y <= 0.0 {
        f64::INFINITY
    } else {
        phi_inv_ln(y.ln())
    }
}
