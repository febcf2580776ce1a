//! Encodes and decodes the synthetic QCIF sequence with the Wyner-Ziv codec
//! and prints per-frame rate and quality.
//!
//! cargo run --release --example wz_codec -- [f] [gop] [polar|ldpca]

use polar_dvc::sw::SwSession;
use polar_dvc::wz::{
    band_distortion, decode_sequence, encode_sequence, psnr, synthetic_sequence, AnyCode, CodecConfig,
};

fn main() -> polar_dvc::Result<()> {
    let mut args = std::env::args().skip(1);
    let f = args.next().map_or(Ok(4), |a| a.parse()).expect("f must be an integer");
    let gop = args.next().map_or(Ok(2), |a| a.parse()).expect("gop must be an integer");
    let codec = args.next().map_or(Ok(Default::default()), |a| a.parse())?;
    let frames = synthetic_sequence(176, 144, 8, 1)?;
    let config = CodecConfig { f, gop, codec, ..CodecConfig::default() };
    let mut session = SwSession::new(AnyCode::build(&config, frames[0].block_count(), None)?, config.crc());
    let stream = encode_sequence(&session, &frames, &config)?;
    let decoded = decode_sequence(&mut session, &stream)?;
    for r in &decoded.reports {
        println!(
            "frame {:>2} {:>3}: {:>6} bits, {:>6.2} dB, {:.3} s",
            r.index,
            r.kind.to_string(),
            r.rate_bits,
            psnr(&decoded.frames[r.index], &frames[r.index])?,
            r.decode_seconds
        );
    }
    let dist = band_distortion(&frames, &decoded)?;
    println!(
        "{} at f = {f}, GOP {gop}: {:.2} kbps, {}/{} bands lossless, bin-width bound holds: {}",
        config.codec,
        decoded.kbps(decoded.wz_bits()),
        dist.iter().filter(|d| d.lossless).count(),
        dist.len(),
        dist.iter().all(|d| d.bound_holds())
    );
    Ok(())
}
