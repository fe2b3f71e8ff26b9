//! The unstructured-case extraction pipeline: typical set, pair energy,
//! dense-pair subset, component graph and span certification.

pub mod bsg;
pub mod graph;
pub mod pipeline;
pub mod typical;

pub use bsg::{bsg_extract, BsgOutcome, BsgWitness, BSG_CONSTRUCTIVE_MAX};
pub use graph::{component_extract, ComponentGraph};
pub use pipeline::{
    energy_floor, unstructured_pipeline, SetSummary, UnstructuredOutcome, UnstructuredReport,
};
pub use typical::{pair_energy, typical_density_check, typical_set, TypicalSet};
