//! Builds the degradation-ordered reliability sequence for a shortened code
//! and shows how it defines a nested chain of frozen sets.
//!
//! cargo run --release --example construct_sequence -- [n]

use polar_dvc::construction::{build_with_trace, ordering_violation, ChannelParam, ConstructionParams};
use polar_dvc::polar::NestedChain;

fn main() -> polar_dvc::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(Ok(396), |a| a.parse()).expect("n must be an integer");
    let params = ConstructionParams::new(1e-3, 1e-4)?;
    let start = std::time::Instant::now();
    let (seq, trace) = build_with_trace(n, &params)?;
    println!(
        "n = {n} (mother length {}): {} GA evaluations in {:.2?}",
        n.next_power_of_two(),
        trace.ga_evaluations,
        start.elapsed()
    );
    println!("least reliable u positions: {:?}", &seq.indices()[..8]);
    println!("most reliable u positions:  {:?}", &seq.indices()[n - 8..]);
    println!(
        "channel parameter went from {:.3} to {:.3}",
        trace.sigmas[0],
        trace.sigmas[trace.sigmas.len() - 1]
    );
    let chain = NestedChain::default_for(n)?;
    println!("default chain: {} codes, nested = {}", chain.omega(), seq.is_nested_for(&chain));
    for sigma in [0.2, 0.5, 1.0] {
        let (v, _) = ordering_violation(&seq, ChannelParam::new(sigma)?)?;
        println!("largest Z inversion at sigma {sigma}: {v:.3e}");
    }
    Ok(())
}
