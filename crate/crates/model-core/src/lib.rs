//! Random environments for planar last passage percolation.
//!
//! Two models are supported: a Poisson point cloud in space-time, where
//! passage values count points on causal chains, and a weighted lattice,
//! where passage values sum cell weights along up-right paths.

pub mod descriptor;
pub mod error;
pub mod lattice;
pub mod point;
pub mod poisson;
pub mod rng;
pub mod scaling;

pub use descriptor::{Environment, EnvironmentDescriptor};
pub use error::ModelError;
pub use lattice::{make_lattice_field, Cell, LatticeField, Law};
pub use point::{causal_leq, rotate45, OrderedQuad, Region, SpaceTimePoint};
pub use poisson::{make_poisson_cloud, PoissonCloud};
pub use scaling::ScalingFrame;
