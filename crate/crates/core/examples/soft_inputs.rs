//! Basic and proposed LLRs for a multilevel label, and the integer closed
//! form of the proposed distance.
//!
//! cargo run --example soft_inputs

use polar_dvc::sw::{basic_llr, proposed_llr, proposed_r_fast, LaplaceModel, QuantizerSpec};

fn main() -> polar_dvc::Result<()> {
    // 6-bit DC range, 2-bit labels: bins of width 16.
    let q = QuantizerSpec::uniform_dc(6, 2)?;
    let model = LaplaceModel::new(0.5)?;
    println!("bins: {:?}", (0..q.level_count()).map(|j| q.bin_bounds(j)).collect::<Vec<_>>());
    println!("{:>4} {:>8} {:>10} {:>10} {:>10} {:>10}", "s", "label", "basic b0", "prop b0", "basic b1", "prop b1");
    for s in [0, 10, 15, 16, 30, 33, 40, 47, 48, 63] {
        let label = q.quantize(s);
        // Bit 1 conditioned on the true first bit.
        let sf = s as f64;
        println!(
            "{s:>4} {:>8} {:>10.3} {:>10.3} {:>10.3} {:>10.3}",
            format!("{label:?}"),
            basic_llr(&[], sf, &model, &q),
            proposed_llr(&[], sf, &model, &q),
            basic_llr(&label[..1], sf, &model, &q),
            proposed_llr(&label[..1], sf, &model, &q),
        );
    }
    println!("closed-form R for the empty prefix, beta = 6:");
    for s in [-5, 0, 20, 31, 32, 40, 70] {
        println!("  s = {s:>3}: R = {}", proposed_r_fast(&[], s, 6));
    }
    Ok(())
}
