use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::point::{OrderedQuad, SpaceTimePoint};

/// KPZ scaling with time scale `n`, space scale `n^{2/3}` and fluctuation scale `n^{1/3}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFrame {
    pub n: f64,
}

impl ScalingFrame {
    pub fn new(n: f64) -> Result<Self, ModelError> {
        if n > 0.0 && n.is_finite() {
            Ok(Self { n })
        } else {
            Err(ModelError::Parameter { name: "n", detail: format!("{n} is not positive") })
        }
    }

    pub fn space_scale(&self) -> f64 {
        self.n.powf(2.0 / 3.0)
    }

    pub fn fluctuation_scale(&self) -> f64 {
        self.n.cbrt()
    }

    /// `(v - 2n(t - s)) / n^{1/3}` for a value measured across the scaled quad `centering`.
    pub fn value(&self, v: f64, centering: &OrderedQuad) -> f64 {
        (v - 2.0 * self.n * centering.duration()) / self.fluctuation_scale()
    }

    /// `v / n^{1/3}`, for quantities with no linear drift such as gaps.
    pub fn fluctuation(&self, v: f64) -> f64 {
        v / self.fluctuation_scale()
    }

    pub fn space(&self, x: f64) -> f64 {
        x / self.space_scale()
    }

    /// Raw point to scaled point.
    pub fn point(&self, p: &SpaceTimePoint) -> SpaceTimePoint {
        SpaceTimePoint::new(self.space(p.x), p.t / self.n)
    }

    /// Scaled point to raw point.
    pub fn raw_point(&self, p: &SpaceTimePoint) -> SpaceTimePoint {
        SpaceTimePoint::new(p.x * self.space_scale(), p.t * self.n)
    }
}
