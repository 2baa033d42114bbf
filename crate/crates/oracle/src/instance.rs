use model_core::rng::Stream;
use model_core::{causal_leq, Cell, LatticeField, OrderedQuad, PoissonCloud, Region, SpaceTimePoint};
use serde::{Deserialize, Serialize};

use crate::{OracleError, MAX_CLOUD_POINTS, MAX_LATTICE_SIDE};

/// An environment with a start pair and an end pair, each ordered left first.
///
/// Single-path questions use `start.0 -> end.0`. Equal members of a pair
/// form a doubled anchor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum Instance {
    Lattice { field: LatticeField, start: (Cell, Cell), end: (Cell, Cell) },
    Cloud { cloud: PoissonCloud, start: (SpaceTimePoint, SpaceTimePoint), end: (SpaceTimePoint, SpaceTimePoint) },
}

impl Instance {
    pub fn lattice_doubled(field: LatticeField, a: Cell, b: Cell) -> Self {
        Self::Lattice { field, start: (a, a), end: (b, b) }
    }

    pub fn cloud_doubled(cloud: PoissonCloud, quad: OrderedQuad) -> Self {
        Self::Cloud { cloud, start: (quad.start, quad.start), end: (quad.end, quad.end) }
    }

    pub fn is_doubled(&self) -> bool {
        match self {
            Self::Lattice { start, end, .. } => start.0 == start.1 && end.0 == end.1,
            Self::Cloud { start, end, .. } => start.0 == start.1 && end.0 == end.1,
        }
    }

    /// Anchors of the single-path question as points.
    pub fn quad(&self) -> OrderedQuad {
        match self {
            Self::Lattice { start, end, .. } => OrderedQuad { start: start.0.point(), end: end.0.point() },
            Self::Cloud { start, end, .. } => OrderedQuad { start: start.0, end: end.0 },
        }
    }

    pub fn check_size(&self) -> Result<(), OracleError> {
        match self {
            Self::Lattice { field, start, end } => {
                if field.rows > MAX_LATTICE_SIDE || field.cols > MAX_LATTICE_SIDE {
                    return Err(OracleError::TooLarge { what: "lattice side", limit: MAX_LATTICE_SIDE });
                }
                for c in [start.0, start.1, end.0, end.1] {
                    if !field.contains(c) {
                        return Err(OracleError::Invalid(format!("{c:?} outside the field")));
                    }
                }
                if start.0.time() != start.1.time() || end.0.time() != end.1.time() {
                    return Err(OracleError::Invalid("pair members at different times".into()));
                }
            }
            Self::Cloud { cloud, start, end } => {
                if cloud.len() > MAX_CLOUD_POINTS {
                    return Err(OracleError::TooLarge { what: "cloud size", limit: MAX_CLOUD_POINTS });
                }
                if start.0.t != start.1.t || end.0.t != end.1.t {
                    return Err(OracleError::Invalid("pair members at different times".into()));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// The same question posed on the reflected environment.
    pub fn reflect(&self) -> Self {
        match self {
            Self::Lattice { field, start, end } => {
                let r = |c| field.reflect_cell(c);
                Self::Lattice { field: field.reflect(), start: (r(end.1), r(end.0)), end: (r(start.1), r(start.0)) }
            }
            Self::Cloud { cloud, start, end } => Self::Cloud {
                cloud: cloud.reflect(),
                start: (end.1.mirrored(), end.0.mirrored()),
                end: (start.1.mirrored(), start.0.mirrored()),
            },
        }
    }
}

/// Geometric(1/2) weights in an explicit lattice with at most `max_side` rows and columns.
///
/// About one instance in four uses distinct anchor pairs when the shape allows.
pub fn random_lattice_instance(seed: u64, index: u64, max_side: usize) -> Instance {
    let mut s = Stream::new(seed, 1 << 40, index);
    let rows = 1 + (s.next_u64() % max_side as u64) as usize;
    let cols = 1 + (s.next_u64() % max_side as u64) as usize;
    let weights = (0..rows)
        .map(|_| (0..cols).map(|_| (s.next_f64().ln() / 0.5f64.ln()).floor()).collect())
        .collect();
    let field = LatticeField::explicit(weights).expect("rectangular");
    if rows >= 2 && cols >= 2 && rows + cols >= 5 && s.next_u64() % 4 == 0 {
        let start = (Cell::new(1, 0), Cell::new(0, 1));
        let end = (Cell::new(rows - 1, cols - 2), Cell::new(rows - 2, cols - 1));
        return Instance::Lattice { field, start, end };
    }
    if rows * cols == 1 {
        return Instance::lattice_doubled(field, Cell::new(0, 0), Cell::new(0, 0));
    }
    Instance::lattice_doubled(field, Cell::new(0, 0), Cell::new(rows - 1, cols - 1))
}

/// Cloud of 0 to `max_points` points near the diamond from `(0,0)` to `(0,2)`.
///
/// About one instance in four uses distinct anchor pairs.
pub fn random_cloud_instance(seed: u64, index: u64, max_points: usize) -> Instance {
    let mut s = Stream::new(seed, 1 << 41, index);
    let n = (s.next_u64() % (max_points as u64 + 1)) as usize;
    let region = Region::new(-1.1, 1.1, 0.0, 2.0);
    let points = (0..n)
        .map(|_| {
            // Uniform in light-cone coordinates over a slightly larger square, clipped to the region.
            let u = 2.2 * s.next_f64() - 0.1;
            let v = 2.2 * s.next_f64() - 0.1;
            SpaceTimePoint::new((u - v) / 2.0, ((u + v) / 2.0).clamp(0.0, 2.0))
        })
        .collect();
    let cloud = PoissonCloud::from_points(region, points);
    let (a, b) = (SpaceTimePoint::new(0.0, 0.0), SpaceTimePoint::new(0.0, 2.0));
    if s.next_u64() % 4 == 0 {
        let start = (SpaceTimePoint::new(-0.2, 0.0), SpaceTimePoint::new(0.2, 0.0));
        let end = (SpaceTimePoint::new(-0.2, 2.0), SpaceTimePoint::new(0.2, 2.0));
        debug_assert!(causal_leq(&start.0, &end.0));
        return Instance::Cloud { cloud, start, end };
    }
    Instance::cloud_doubled(cloud, OrderedQuad { start: a, end: b })
}
