use model_core::{Cell, LatticeField, OrderedQuad, PoissonCloud, SpaceTimePoint};
use passage_engine::poisson::PointPair;
use passage_engine::{lattice, poisson, Chain, DisjointPair, GeodesicNetwork, Side};

use crate::ClassifyError;

/// A borrowed environment addressed by space-time points.
///
/// Lattice sites are given by their natural coordinates `(col - row, row + col)`.
#[derive(Debug, Clone, Copy)]
pub enum Model<'a> {
    Lattice(&'a LatticeField),
    Poisson(&'a PoissonCloud),
}

fn cell(p: &SpaceTimePoint) -> Result<Cell, ClassifyError> {
    Cell::from_point(p).ok_or_else(|| ClassifyError::NotASite(format!("({}, {})", p.x, p.t)))
}

fn quad(a: &SpaceTimePoint, b: &SpaceTimePoint) -> Result<OrderedQuad, ClassifyError> {
    OrderedQuad::new(*a, *b).map_err(|e| ClassifyError::NotASite(e.to_string()))
}

impl Model<'_> {
    /// Integer-valued environment.
    pub fn exact(&self) -> bool {
        match self {
            Model::Lattice(f) => f.is_integer(),
            Model::Poisson(_) => true,
        }
    }

    pub fn passage_value(&self, a: &SpaceTimePoint, b: &SpaceTimePoint) -> Result<f64, ClassifyError> {
        Ok(match self {
            Model::Lattice(f) => lattice::passage_value(f, cell(a)?, cell(b)?)?,
            Model::Poisson(c) => poisson::passage_value(c, &quad(a, b)?)?,
        })
    }

    pub fn disjoint2(&self, start: &PointPair, end: &PointPair) -> Result<Option<f64>, ClassifyError> {
        Ok(match self {
            Model::Lattice(f) => lattice::disjoint2_value(f, (cell(&start.0)?, cell(&start.1)?), (cell(&end.0)?, cell(&end.1)?))?,
            Model::Poisson(c) => poisson::disjoint2_value(c, start, end)?,
        })
    }

    pub fn optimizer2(&self, start: &PointPair, end: &PointPair, side: Side) -> Result<Option<DisjointPair>, ClassifyError> {
        Ok(match self {
            Model::Lattice(f) => {
                lattice::optimizer2(f, (cell(&start.0)?, cell(&start.1)?), (cell(&end.0)?, cell(&end.1)?), side)?
            }
            Model::Poisson(c) => poisson::optimizer2(c, start, end, side)?,
        })
    }

    pub fn geodesic(&self, a: &SpaceTimePoint, b: &SpaceTimePoint, side: Side) -> Result<Chain, ClassifyError> {
        Ok(match self {
            Model::Lattice(f) => lattice::geodesic(f, cell(a)?, cell(b)?, side)?,
            Model::Poisson(c) => poisson::geodesic(c, &quad(a, b)?, side)?,
        })
    }

    pub fn network(&self, a: &SpaceTimePoint, b: &SpaceTimePoint) -> Result<GeodesicNetwork, ClassifyError> {
        Ok(match self {
            Model::Lattice(f) => lattice::network(f, cell(a)?, cell(b)?)?,
            Model::Poisson(c) => poisson::network(c, &quad(a, b)?)?,
        })
    }

    /// Whether `p` lies on some geodesic from `a` to `b`.
    pub fn on_optimal(&self, a: &SpaceTimePoint, b: &SpaceTimePoint, p: &SpaceTimePoint) -> Result<bool, ClassifyError> {
        Ok(match self {
            Model::Lattice(f) => lattice::on_optimal(f, cell(a)?, cell(b)?, cell(p)?)?,
            Model::Poisson(c) => poisson::on_optimal(c, &quad(a, b)?, p)?,
        })
    }

    /// Nearest site to `(x, t)` at time `t`: lattice positions need the parity of `t`.
    pub fn snap(&self, x: f64, t: f64) -> SpaceTimePoint {
        match self {
            Model::Lattice(_) => {
                let t = t.round();
                let parity = t.rem_euclid(2.0);
                SpaceTimePoint::new(((x - parity) / 2.0).round() * 2.0 + parity, t)
            }
            Model::Poisson(_) => SpaceTimePoint::new(x, t),
        }
    }

    /// `2 L - L_2` between doubled anchors.
    pub fn gap(&self, a: &SpaceTimePoint, b: &SpaceTimePoint) -> Result<Option<f64>, ClassifyError> {
        Ok(match self {
            Model::Lattice(f) => lattice::gap(f, cell(a)?, cell(b)?)?,
            Model::Poisson(c) => Some(poisson::gap(c, &quad(a, b)?)?),
        })
    }
}
