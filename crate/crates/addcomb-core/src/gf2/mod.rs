//! Exact set algebra over F2^n: vectors, sets, sumsets, symmetry sets,
//! spans and the canonical set file format.

pub mod set;
pub mod setfile;
pub mod span;
pub mod vector;

pub use set::{F2Set, DENSE_DIM_MAX};
pub use span::SpanBasis;
pub use vector::{F2Vector, SET_DIM_MAX};
