//! The structured-case pipeline: near-full-fiber sets, level sets, the
//! geometric chain with pigeonhole selection, and span certification.

pub mod chain;
pub mod levels;
pub mod pipeline;

pub use chain::{chain_deltas, chain_length, chain_select, ChainReport};
pub use levels::{
    b_size_hypothesis_holds, containment_checks, delta_hat, eps_gate_check, level_set,
    scan_a_star, smallest_integer_l, structured_b, sumset_containment_check, LevelSet,
    CONTAINMENT_SET_MAX, DELTA_PRECISION_BITS,
};
pub use pipeline::{structured_pipeline, StructuredOutcome, StructuredReport};
