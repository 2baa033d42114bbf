use model_core::SpaceTimePoint;
use passage_engine::Chain;

use crate::BusemannError;

/// First site of the longest common tail of two chains with a common end.
pub fn coalescence_point(a: &Chain, b: &Chain) -> Result<SpaceTimePoint, BusemannError> {
    let (ga, gb) = (a.graph(), b.graph());
    if ga.last() != gb.last() {
        return Err(BusemannError::DifferentTerminals);
    }
    let shared = ga.iter().rev().zip(gb.iter().rev()).take_while(|(p, q)| p == q).count();
    Ok(ga[ga.len() - shared])
}

/// Earliest time from which the two chains run through the same sites.
///
/// Identical chains coalesce at their start; chains meeting only at the end
/// coalesce at the end time.
pub fn coalescence_time(a: &Chain, b: &Chain) -> Result<f64, BusemannError> {
    Ok(coalescence_point(a, b)?.t)
}
