//! Synthetic Slepian-Wolf simulation: multistage coding of a quantized band
//! over an integer Laplace channel, comparing both soft-input rules and both
//! codes on the same draws.
//!
//! cargo run --release --example laplace_channel -- [trials]

use polar_dvc::harness::{run_swsim, ExperimentConfig};
use polar_dvc::sw::LlrMode;
use polar_dvc::wz::{CodecConfig, CodecKind};

fn main() -> polar_dvc::Result<()> {
    let trials = std::env::args().nth(1).map_or(Ok(5), |a| a.parse()).expect("trials must be an integer");
    let config = ExperimentConfig {
        codec: CodecConfig {
            list_size: 16,
            ..CodecConfig::default()
        },
        alphas: vec![0.3, 1.0, 3.0],
        trials,
        ..ExperimentConfig::default()
    };
    let points = run_swsim(&config, &[CodecKind::Polar, CodecKind::Ldpca], &[LlrMode::Basic, LlrMode::Proposed])?;
    println!("{:>6} {:>6} {:>9} {:>8} {:>8}", "codec", "alpha", "mode", "rate", "H");
    for p in points {
        println!(
            "{:>6} {:>6} {:>9} {:>8.4} {:>8.4}",
            p.codec.to_string(),
            p.alpha,
            format!("{:?}", p.llr_mode),
            p.mean_rate,
            p.entropy_rate
        );
    }
    Ok(())
}
