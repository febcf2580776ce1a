//! Nested shortened polar code construction.
//!
//! Subchannel reliabilities are tracked with Gaussian-approximation density
//! evolution over the BPSK-AWGN family `W(σ)`; the reliability sequence is
//! built by repeatedly degrading the channel until the best remaining
//! subchannel reaches a target Bhattacharyya parameter.

mod ga;
mod phi;
mod sequence;

pub use ga::{
    bhattacharyya_from_mean, degradation_check, ga_evolve, ChannelParam, DegradationReport, GaState,
};
pub use phi::{ln_phi, phi, phi_inv, phi_inv_ln};
pub use sequence::{
    build_reliability_sequence, build_with_trace, cache_path, load_or_build, ordering_violation,
    read_sequence_file, write_sequence_file, ConstructionParams, ConstructionTrace,
    ReliabilitySequence, SequenceHeader,
};
