//! The LDPC-accumulate baseline on its own: rate needed by sum-product
//! decoding at several crossover probabilities.
//!
//! cargo run --release --example ldpca_baseline

use polar_dvc::ldpca::{bp_decode, LdpcaCode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> polar_dvc::Result<()> {
    let n = 1584;
    let code = LdpcaCode::new(n, 0)?;
    println!(
        "graph seed {} (first full-rank seed), {} four-cycles",
        code.graph().seed,
        code.graph().four_cycles()
    );
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for p in [0.01f64, 0.03, 0.06, 0.1] {
        let x: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        let t = code.encode(&x)?;
        let l = ((1.0 - p) / p).ln();
        let llr: Vec<f64> = x
            .iter()
            .map(|&b| if b ^ u8::from(rng.random::<f64>() < p) == 0 { l } else { -l })
            .collect();
        let needed = (1..=n / 24).map(|k| k * 24).find(|&m| {
            let out = bp_decode(&llr, &code.merged_checks(&t[..m]), 100);
            out.success() && out.bits == x
        });
        let h = -(p * p.log2() + (1.0 - p) * (1.0 - p).log2());
        match needed {
            Some(m) => println!("p = {p}: decoded with {m} accumulated syndrome bits (rate {:.3}, H = {h:.3})", m as f64 / n as f64),
            None => println!("p = {p}: needs the full syndrome"),
        }
    }
    Ok(())
}
