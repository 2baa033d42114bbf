use model_core::SpaceTimePoint;
use network_classifier::Model;
use serde::{Deserialize, Serialize};

use crate::BusemannError;

/// The base line time and the two horizons `first < second`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Horizons {
    pub base: f64,
    pub first: f64,
    pub second: f64,
}

impl Horizons {
    /// Horizons `h` and `2h` above `base`.
    pub fn doubling(base: f64, h: f64) -> Self {
        Self { base, first: h, second: 2.0 * h }
    }

    pub fn both(&self) -> [f64; 2] {
        [self.first, self.second]
    }

    pub fn origin(&self, model: Model<'_>) -> SpaceTimePoint {
        model.snap(0.0, self.base)
    }

    pub fn start(&self, model: Model<'_>, x: f64) -> SpaceTimePoint {
        model.snap(x, self.base)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionTarget {
    pub theta: f64,
    pub horizon: f64,
    pub endpoint: SpaceTimePoint,
}

impl DirectionTarget {
    /// `(θ h, base + h)`, snapped to a site; `|θ| < 1` is required.
    pub fn new(model: Model<'_>, theta: f64, base: f64, horizon: f64) -> Result<Self, BusemannError> {
        if !(theta.abs() < 1.0) {
            return Err(BusemannError::OutsideCone { theta });
        }
        Ok(Self { theta, horizon, endpoint: model.snap(theta * horizon, base + horizon) })
    }
}
