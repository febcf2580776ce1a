//! Rate-adaptive decoding of one bitplane: the decoder requests syndrome
//! chunks until the CRC passes. Prints the feedback transcript as CSV.
//!
//! cargo run --release --example feedback_session -- [crossover]

use polar_dvc::construction::{build_reliability_sequence, ConstructionParams};
use polar_dvc::polar::{CrcSpec, Kernel, LlrVector, NestedChain, PolarCodeSpec};
use polar_dvc::sw::{PolarSwCode, SwSession};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> polar_dvc::Result<()> {
    let p: f64 = std::env::args().nth(1).map_or(Ok(0.05), |a| a.parse()).expect("crossover must be a number");
    let n = 1584;
    let seq = build_reliability_sequence(n, &ConstructionParams::new(1e-3, 1e-4)?)?;
    let code = PolarSwCode::new(PolarCodeSpec::new(seq), NestedChain::default_for(n)?, 32, Kernel::MinSum)?;
    let mut session = SwSession::new(code, CrcSpec::CRC28);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
    let buffer = session.compress(&x)?;
    // Side information: x through a binary symmetric channel.
    let l = ((1.0 - p) / p).ln();
    let llr: Vec<f64> = x
        .iter()
        .map(|&b| if b ^ u8::from(rng.random::<f64>() < p) == 0 { l } else { -l })
        .collect();
    let decoded = session.decode_bitplane(&LlrVector::new(llr)?, &buffer, 0, 0)?;
    assert_eq!(decoded, x);
    let h = -(p * p.log2() + (1.0 - p) * (1.0 - p).log2());
    println!(
        "crossover {p}: sent {} bits for {n} source bits (H = {:.0} bits)",
        session.transcript.total_bits(),
        h * n as f64
    );
    session.transcript.write_csv(std::io::stdout()).expect("stdout");
    Ok(())
}

