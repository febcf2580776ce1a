//! Rate-distortion sweep of both soft-input rules on the synthetic sequence,
//! summarized by the Bjøntegaard delta-PSNR.
//!
//! cargo run --release --example rd_curves -- [frames]

use polar_dvc::harness::{run_rd_sweep, ExperimentConfig};
use polar_dvc::sw::LlrMode;
use polar_dvc::wz::{bd_psnr, synthetic_sequence, CodecKind, RdSample};

fn main() -> polar_dvc::Result<()> {
    let frames = std::env::args().nth(1).map_or(Ok(8), |a| a.parse()).expect("frames must be an integer");
    let video = synthetic_sequence(176, 144, frames, 1)?;
    let config = ExperimentConfig {
        f_list: vec![1, 3, 5, 7],
        ..ExperimentConfig::default()
    };
    let rows = run_rd_sweep(&config, &video, &[CodecKind::Polar], &[LlrMode::Basic, LlrMode::Proposed])?;
    for r in &rows {
        println!("{:?} f={} {:.2} kbps {:.2} dB", r.llr_mode, r.f, r.rate_kbps, r.psnr_db);
    }
    let curve = |mode| -> Vec<RdSample> {
        rows.iter()
            .filter(|r| r.llr_mode == mode)
            .map(|r| RdSample { rate_kbps: r.rate_kbps, psnr_db: r.psnr_db })
            .collect()
    };
    println!(
        "BD-PSNR of proposed over basic: {:.3} dB",
        bd_psnr(&curve(LlrMode::Basic), &curve(LlrMode::Proposed))?
    );
    Ok(())
}
