//! SC versus CRC-aided SCL on a shortened polar code over a BI-AWGN channel
//! with syndrome-valued frozen bits.
//!
//! cargo run --release --example list_decoding

use polar_dvc::construction::{build_reliability_sequence, ConstructionParams};
use polar_dvc::polar::{sc_decode, sw_encode_syndrome, CrcSpec, Kernel, LlrVector, NestedChain, PolarCodeSpec, SclDecoder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> polar_dvc::Result<()> {
    let n = 396;
    let spec = PolarCodeSpec::new(build_reliability_sequence(n, &ConstructionParams::new(1e-3, 1e-4)?)?);
    let chain = NestedChain::default_for(n)?;
    let crc = CrcSpec::CRC12;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sigma = 0.9;
    let noise = Normal::new(0.0, sigma).expect("valid deviation");
    let mut scl = SclDecoder::new(spec.mother_len(), 16, Kernel::MinSum)?;
    let stage = chain.omega() / 2;
    let trials = 200;
    let (mut sc_err, mut scl_err) = (0, 0);
    for _ in 0..trials {
        let b: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        let syn = sw_encode_syndrome(&b, &spec)?;
        let llr: Vec<f64> = b
            .iter()
            .map(|&x| {
                let y = if x == 0 { 1.0 } else { -1.0 } + noise.sample(&mut rng);
                2.0 * y / (sigma * sigma)
            })
            .collect();
        let llr = LlrVector::new(llr)?;
        let frozen = spec.frozen_map(&syn[..chain.syndrome_len(stage)])?;
        sc_err += usize::from(sc_decode(&llr, &frozen, Kernel::MinSum)?.x != b);
        let tag = crc.compute(&b);
        scl_err += usize::from(scl.decode(&llr, &frozen, Some((&crc, &tag)))?.x != b);
    }
    println!(
        "n = {n}, k = {}, sigma = {sigma}: SC word errors {sc_err}/{trials}, CRC-aided SCL(16) {scl_err}/{trials}",
        chain.dim(stage)
    );
    Ok(())
}
