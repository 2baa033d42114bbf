//! Exact last passage computations on a realized environment.
//!
//! [`lattice`] handles weighted lattices, [`poisson`] handles point clouds.
//! Both report values as `f64`; integer-weight models give exact integers.

pub mod chain;
pub mod error;
pub mod flow;
pub mod lattice;
pub mod network;
pub mod poisson;
pub mod rsk;

pub use chain::{overlap, Chain, DisjointPair, OverlapInterval};
pub use error::PassageError;
pub use network::{Bridges, GeodesicNetwork, NetworkEdge};

/// Which extremal optimizer to extract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// Equality of passage values: exact for integer models, relative `1e-9` otherwise.
#[inline]
pub fn same_value(a: f64, b: f64, exact: bool) -> bool {
    if exact {
        a == b
    } else {
        (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
    }
}
