//! Integer 4×4 transform, zigzag bands and side information on one frame
//! pair: per-band residual statistics and the fitted Laplace parameter.
//!
//! cargo run --release --example transform_bands

use polar_dvc::sw::fit_alpha;
use polar_dvc::wz::{extract_bands, make_side_information, psnr, synthetic_sequence, ZIGZAG};

fn main() -> polar_dvc::Result<()> {
    let frames = synthetic_sequence(176, 144, 3, 1)?;
    let si = make_side_information(&frames[0], &frames[2], 0.5)?;
    println!("side information PSNR: {:.2} dB", psnr(&si, &frames[1])?);
    let x = extract_bands(&frames[1]);
    let y = extract_bands(&si);
    println!("{:>4} {:>6} {:>10} {:>10} {:>8}", "band", "pos", "max |X|", "mean |X-Y|", "alpha");
    for band in 0..16 {
        let residual: Vec<f64> = x[band].iter().zip(&y[band]).map(|(&a, &b)| (a - b) as f64).collect();
        let mean = residual.iter().map(|r| r.abs()).sum::<f64>() / residual.len() as f64;
        let max = x[band].iter().map(|v| v.abs()).max().unwrap_or(0);
        println!(
            "{band:>4} {:>6} {max:>10} {mean:>10.2} {:>8.4}",
            format!("{:?}", ZIGZAG[band]),
            fit_alpha(&residual)?
        );
    }
    Ok(())
}
