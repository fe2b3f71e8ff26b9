//! Exact additive-structure toolkit over F2^n.
//!
//! Everything here is exact: set algebra on explicit-dimension bit vectors,
//! symmetry-set (XOR autocorrelation) statistics with interchangeable naive
//! and Walsh–Hadamard kernels, second-moment quantities as big rationals,
//! and two structure-extraction pipelines that certify span bounds on the
//! subsets they return. Floating point never enters a comparison; it only
//! appears in report rendering.
//!
//! The default `parallel` feature routes the data-parallel inner loops
//! (pair enumeration, transforms, level-set sweeps) through rayon. Disabling
//! it yields a dependency-free sequential build; both produce bit-identical
//! results.

pub mod error;
pub mod extract;
pub mod generators;
pub mod gf2;
pub mod par;
pub mod rat;
pub mod report;
pub mod stats;
pub mod structured;

pub use error::{Error, Result};
pub use gf2::{F2Set, F2Vector, SpanBasis};
pub use stats::{ProfileMethod, SymmetryProfile};
