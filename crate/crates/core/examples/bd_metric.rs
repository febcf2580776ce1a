//! Bjøntegaard delta-PSNR between two RD CSV files written by
//! `dvc rd-sweep`, or between two built-in curves when no files are given.
//!
//! cargo run --example bd_metric -- [a.csv b.csv]

use std::path::Path;

use polar_dvc::harness::read_rd_csv;
use polar_dvc::wz::{bd_psnr, RdSample};

fn main() -> polar_dvc::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (a, b) = if let [a, b] = &args[..] {
        (read_rd_csv(Path::new(a), &[])?, read_rd_csv(Path::new(b), &[])?)
    } else {
        let a = [(95.0, 30.1), (180.0, 32.8), (340.0, 35.2), (610.0, 37.0)];
        let b = [(90.0, 30.4), (170.0, 33.2), (330.0, 35.6), (600.0, 37.3)];
        let curve = |pts: &[(f64, f64)]| -> Vec<RdSample> {
            pts.iter().map(|&(rate_kbps, psnr_db)| RdSample { rate_kbps, psnr_db }).collect()
        };
        (curve(&a), curve(&b))
    };
    println!("BD-PSNR (B over A): {:.4} dB", bd_psnr(&a, &b)?);
    Ok(())
}
