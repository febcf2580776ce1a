//! PSNR and the Bjøntegaard delta-PSNR.

use nalgebra::{DMatrix, DVector};

use super::bands::FrameBuffer;
use crate::{Error, Result};

/// PSNR reported for identical frames.
pub const PSNR_CAP: f64 = 99.0;

/// `10 log10(255² / MSE)`, capped at [`PSNR_CAP`].
pub fn psnr(a: &FrameBuffer, b: &FrameBuffer) -> Result<f64> {
    if !a.same_size(b) {
        return Err(Error::invalid("PSNR of frames with different sizes"));
    }
    let se: u64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| (x as i64 - y as i64).pow(2) as u64)
        .sum();
    if se == 0 {
        return Ok(PSNR_CAP);
    }
    let mse = se as f64 / a.data().len() as f64;
    Ok((10.0 * (255.0f64 * 255.0 / mse).log10()).min(PSNR_CAP))
}

/// One rate-distortion point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RdSample {
    pub rate_kbps: f64,
    pub psnr_db: f64,
}

/// Least-squares cubic `psnr ≈ c0 + c1 r + c2 r² + c3 r³` in `r = log10(rate)`.
pub fn fit_cubic(curve: &[RdSample]) -> Result<[f64; 4]> {
    if curve.len() < 4 {
        return Err(Error::invalid(format!("BD-PSNR needs at least 4 points, got {}", curve.len())));
    }
    if curve.iter().any(|p| !(p.rate_kbps > 0.0) || !p.psnr_db.is_finite()) {
        return Err(Error::invalid("BD-PSNR needs positive rates and finite PSNR"));
    }
    let a = DMatrix::from_fn(curve.len(), 4, |i, j| curve[i].rate_kbps.log10().powi(j as i32));
    let b = DVector::from_iterator(curve.len(), curve.iter().map(|p| p.psnr_db));
    let c = a
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|e| Error::invalid(format!("cubic fit failed: {e}")))?;
    Ok([c[0], c[1], c[2], c[3]])
}

/// `∫ₐᵇ p(r) dr` for a cubic.
pub fn integrate_cubic(c: &[f64; 4], a: f64, b: f64) -> f64 {
    let prim = |r: f64| c[0] * r + c[1] * r * r / 2.0 + c[2] * r.powi(3) / 3.0 + c[3] * r.powi(4) / 4.0;
    prim(b) - prim(a)
}

fn log_rate_span(curve: &[RdSample]) -> (f64, f64) {
    curve.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let r = p.rate_kbps.log10();
        (lo.min(r), hi.max(r))
    })
}

/// Average PSNR gain of `b` over `a` across their common log-rate interval.
pub fn bd_psnr(a: &[RdSample], b: &[RdSample]) -> Result<f64> {
    let ca = fit_cubic(a)?;
    let cb = fit_cubic(b)?;
    let (alo, ahi) = log_rate_span(a);
    let (blo, bhi) = log_rate_span(b);
    let (lo, hi) = (alo.max(blo), ahi.min(bhi));
    if !(hi > lo) {
        return Err(Error::invalid("rate ranges of the two curves do not overlap"));
    }
    Ok((integrate_cubic(&cb, lo, hi) - integrate_cubic(&ca, lo, hi)) / (hi - lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(points: &[(f64, f64)]) -> Vec<RdSample> {
        points
            .iter()
            .map(|&(rate_kbps, psnr_db)| RdSample { rate_kbps, psnr_db })
            .collect()
    }

    #[test]
    fn psnr_values() {
        let a = FrameBuffer::filled(4, 4, 100).unwrap();
        assert_eq!(psnr(&a, &a).unwrap(), PSNR_CAP);
        let b = FrameBuffer::filled(4, 4, 101).unwrap();
        assert!((psnr(&a, &b).unwrap() - 10.0 * (255.0f64 * 255.0).log10()).abs() < 1e-12);
        assert!(psnr(&a, &FrameBuffer::filled(8, 4, 0).unwrap()).is_err());
    }

    #[test]
    fn identical_curves_give_zero() {
        let c = curve(&[(100.0, 30.0), (200.0, 33.1), (400.0, 35.7), (800.0, 37.2), (1200.0, 38.0)]);
        assert_eq!(bd_psnr(&c, &c).unwrap(), 0.0);
    }

    #[test]
    fn constant_offset() {
        let a = curve(&[(100.0, 30.0), (200.0, 33.1), (400.0, 35.7), (800.0, 37.2)]);
        let b: Vec<RdSample> = a.iter().map(|p| RdSample { psnr_db: p.psnr_db + 0.5, ..*p }).collect();
        assert!((bd_psnr(&a, &b).unwrap() - 0.5).abs() < 1e-9);
        assert!((bd_psnr(&b, &a).unwrap() + 0.5).abs() < 1e-9);
    }

    #[test]
    fn cubic_fit_interpolates_four_points_and_integral_matches_quadrature() {
        let a = curve(&[(50.0, 28.0), (120.0, 31.5), (300.0, 35.0), (700.0, 36.4)]);
        let b = curve(&[(60.0, 29.0), (150.0, 32.9), (350.0, 35.6), (900.0, 37.5)]);
        let ca = fit_cubic(&a).unwrap();
        let eval = |c: &[f64; 4], r: f64| c[0] + c[1] * r + c[2] * r * r + c[3] * r.powi(3);
        for p in &a {
            assert!((eval(&ca, p.rate_kbps.log10()) - p.psnr_db).abs() < 1e-8);
        }
        let cb = fit_cubic(&b).unwrap();
        let (lo, hi) = (60f64.log10(), 700f64.log10());
        // Composite trapezoid on the fitted difference.
        let steps = 200_000;
        let h = (hi - lo) / steps as f64;
        let mut acc = 0.0;
        for k in 0..=steps {
            let r = lo + k as f64 * h;
            let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
            acc += w * (eval(&cb, r) - eval(&ca, r));
        }
        let numeric = acc * h / (hi - lo);
        assert!((bd_psnr(&a, &b).unwrap() - numeric).abs() < 1e-8);
    }

    #[test]
    fn errors() {
        let a = curve(&[(100.0, 30.0), (200.0, 33.0), (400.0, 35.0)]);
        assert!(bd_psnr(&a, &a).is_err());
        let lo = curve(&[(1.0, 30.0), (2.0, 31.0), (3.0, 32.0), (4.0, 33.0)]);
        let hi = curve(&[(10.0, 30.0), (20.0, 31.0), (30.0, 32.0), (40.0, 33.0)]);
        assert!(bd_psnr(&lo, &hi).is_err());
        assert!(fit_cubic(&curve(&[(0.0, 1.0), (1.0, 1.0), (2.0, 1.0), (3.0, 1.0)])).is_err());
    }
}
