use model_core::SpaceTimePoint;
use passage_engine::{overlap, same_value, Side};
use serde::{Deserialize, Serialize};

use crate::{ClassifyError, Model};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub residual: f64,
    pub holds: bool,
}

/// Residual of `L(x^2; (y, y+eps)) - L(x^2; y^2) = L(x; y+eps) - L(x; y)`.
///
/// `eps` is a natural space offset; on a lattice it must be an even integer.
/// `None` when a pair value is undefined.
pub fn right_min_identity(
    model: Model<'_>,
    x: SpaceTimePoint,
    y: SpaceTimePoint,
    eps: f64,
) -> Result<Option<IdentityCheck>, ClassifyError> {
    let ye = SpaceTimePoint::new(y.x + eps, y.t);
    let (Some(split), Some(doubled)) = (model.disjoint2(&(x, x), &(y, ye))?, model.disjoint2(&(x, x), &(y, y))?) else {
        return Ok(None);
    };
    let residual = (split - doubled) - (model.passage_value(&x, &ye)? - model.passage_value(&x, &y)?);
    Ok(Some(IdentityCheck { residual, holds: same_value(residual, 0.0, model.exact()) }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneSidedReport {
    /// The right member of the rightmost 2-optimizer runs along the rightmost
    /// geodesic on a terminal interval of positive length.
    pub coincides: bool,
    /// That interval, when there is one.
    pub interval: Option<(f64, f64)>,
    pub length: f64,
}

/// Terminal coincidence of the rightmost 2-optimizer with the rightmost geodesic.
pub fn one_sided_diag(model: Model<'_>, x: SpaceTimePoint, y: SpaceTimePoint) -> Result<Option<OneSidedReport>, ClassifyError> {
    let Some(pair) = model.optimizer2(&(x, x), &(y, y), Side::Right)? else {
        return Ok(None);
    };
    let geo = model.geodesic(&x, &y, Side::Right)?;
    let interval = overlap(&pair.right, &geo).intervals.last().copied().filter(|&(s, e)| e == y.t && e > s);
    Ok(Some(OneSidedReport {
        coincides: interval.is_some(),
        interval,
        length: interval.map_or(0.0, |(s, e)| e - s),
    }))
}
