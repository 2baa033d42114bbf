//! Brute-force ground truth on tiny environments.
//!
//! Everything here enumerates the full path space, so instances are capped at
//! a 5x5 lattice or a 12-point cloud.

mod enumerate;
mod instance;
mod verify;

pub use enumerate::{
    enumerate_disjoint_pairs, enumerate_paths, network_vertices, weak_pair_value, weakly_left, EnumerationResult,
};
pub use instance::{random_cloud_instance, random_lattice_instance, Instance};
pub use verify::{
    verify_engine, weak_probe, BatchSpec, Counterexample, EngineUnderTest, ExactEngine, VerifyReport, WeakProbeReport,
};

pub const MAX_LATTICE_SIDE: usize = 5;
pub const MAX_CLOUD_POINTS: usize = 12;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("instance too large: {what} exceeds {limit}")]
    TooLarge { what: &'static str, limit: usize },
    #[error("invalid instance: {0}")]
    Invalid(String),
}
