//! Network types of fixed-time geodesic networks, read off the geodesics
//! themselves and off the gap sheet, and the agreement between the two.

pub mod agreement;
pub mod dictionary;
pub mod geometric;
pub mod identity;
pub mod model;

pub use agreement::{agreement_matrix, classify_points, AgreementMatrix, AgreementSpec, ClassificationRecord, DEFAULT_COARSE_FRACTION};
pub use dictionary::{classify_gap, classify_gap_with, DEFAULT_RADII};
pub use geometric::{classify_geometric, classify_geometric_coarse, geometric_report, GeometricReport};
pub use identity::{one_sided_diag, right_min_identity, IdentityCheck, OneSidedReport};
pub use model::Model;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NetworkType {
    I,
    IIa,
    IIb,
    III,
    IV,
    Va,
    Vb,
    Other,
}

impl NetworkType {
    pub const ALL: [NetworkType; 8] = [
        NetworkType::I,
        NetworkType::IIa,
        NetworkType::IIb,
        NetworkType::III,
        NetworkType::IV,
        NetworkType::Va,
        NetworkType::Vb,
        NetworkType::Other,
    ];

    /// Types whose two extremal geodesics are disjoint.
    pub const ZERO_TYPES: [NetworkType; 3] = [NetworkType::IV, NetworkType::Va, NetworkType::Vb];

    /// Types read from plateau minima when the gap is positive.
    pub const MINIMUM_TYPES: [NetworkType; 4] = [NetworkType::I, NetworkType::IIa, NetworkType::IIb, NetworkType::III];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            NetworkType::I => "I",
            NetworkType::IIa => "IIa",
            NetworkType::IIb => "IIb",
            NetworkType::III => "III",
            NetworkType::IV => "IV",
            NetworkType::Va => "Va",
            NetworkType::Vb => "Vb",
            NetworkType::Other => "other",
        }
    }

    pub fn is_zero_type(self) -> bool {
        Self::ZERO_TYPES.contains(&self)
    }
}

impl std::fmt::Display for NetworkType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Passage(#[from] passage_engine::PassageError),
    #[error(transparent)]
    Gap(#[from] gap_lab::GapError),
    #[error("{0} is not a lattice site")]
    NotASite(String),
}
