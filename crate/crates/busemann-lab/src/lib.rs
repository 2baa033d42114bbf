//! Semi-infinite geodesics realized as geodesics to far targets.
//!
//! A direction `θ` at horizon `h` means the target `(θ h, base + h)`, where
//! `base` is the time of the line holding the starting points. Every quantity
//! is computed at two horizons `h` and `2h`; coalescence certificates mark the
//! values that cannot change when the horizon grows.

pub mod busemann;
pub mod coalescence;
pub mod geometry;
pub mod scan;
pub mod semigap;
pub mod stationary;

pub use busemann::{
    anti_coalescence, busemann, busemann_profile, two_path_busemann, BusemannPoint, BusemannProfile, Certificate,
};
pub use coalescence::{coalescence_point, coalescence_time};
pub use geometry::{DirectionTarget, Horizons};
pub use scan::{exceptional_scan, ExceptionalDirection, ScanSpec, DEFAULT_THRESHOLD};
pub use semigap::{
    busemann_gap, classify_semi_infinite, classify_semi_infinite_gap, gap_to_anchors, horizon_identity_residual, BusemannGapProfile, IdentityResidual,
    SemiInfiniteReport, SemiInfiniteType,
};
pub use stationary::{
    reflected_walk_diag, stationary_horizon_tests, DirectionStats, QuadrangleViolation, ReflectedWalkReport, StationaryReport,
};

#[derive(Debug, thiserror::Error)]
pub enum BusemannError {
    #[error(transparent)]
    Classify(#[from] network_classifier::ClassifyError),
    #[error("direction {theta} leaves the causal cone")]
    OutsideCone { theta: f64 },
    #[error("chains end at different points")]
    DifferentTerminals,
    #[error("{0}")]
    Invalid(String),
}
