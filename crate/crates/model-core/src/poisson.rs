use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::point::{Region, SpaceTimePoint};
use crate::rng::Stream;

const COUNT_STREAM: u64 = 0;
const POINT_STREAM: u64 = 1;
/// Largest mean handed to a single inversion draw; `exp(-256)` is far from underflow.
const CHUNK_MEAN: f64 = 256.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonCloud {
    pub seed: u64,
    pub rate: f64,
    pub region: Region,
    /// Sorted by `(t, x)`.
    pub points: Vec<SpaceTimePoint>,
    /// Set when the cloud is the mirror image of the sampled one.
    #[serde(default)]
    pub reflected: bool,
}

/// Homogeneous Poisson process of intensity `rate` on `region`.
///
/// The count is drawn by inversion (split into chunks of mean at most 256,
/// which keeps the law exact), then the points are placed uniformly and sorted.
pub fn make_poisson_cloud(seed: u64, rate: f64, region: Region) -> Result<PoissonCloud, ModelError> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(ModelError::Parameter { name: "rate", detail: format!("{rate} is not a positive number") });
    }
    let area = region.area();
    let mean = rate * area;
    let count = if mean > 0.0 { poisson_count(seed, mean) } else { 0 };

    let mut s = Stream::new(seed, POINT_STREAM, 0);
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let x = region.x_min + region.width() * s.next_f64();
        let t = region.t_min + region.height() * s.next_f64();
        points.push(SpaceTimePoint { x, t });
    }
    sort_points(&mut points);
    Ok(PoissonCloud { seed, rate, region, points, reflected: false })
}

fn poisson_count(seed: u64, mean: f64) -> usize {
    let chunks = (mean / CHUNK_MEAN).ceil().max(1.0) as usize;
    let mu = mean / chunks as f64;
    let mut s = Stream::new(seed, COUNT_STREAM, 0);
    (0..chunks).map(|_| invert_poisson(mu, s.next_f64())).sum()
}

fn invert_poisson(mu: f64, u: f64) -> usize {
    let mut k = 0usize;
    let mut p = (-mu).exp();
    let mut cdf = p;
    while u >= cdf {
        k += 1;
        p *= mu / k as f64;
        let next = cdf + p;
        if next == cdf {
            break;
        }
        cdf = next;
    }
    k
}

pub(crate) fn sort_points(points: &mut [SpaceTimePoint]) {
    points.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.x.total_cmp(&b.x)));
}

impl PoissonCloud {
    /// A cloud with given points, for hand-built instances.
    pub fn from_points(region: Region, mut points: Vec<SpaceTimePoint>) -> Self {
        sort_points(&mut points);
        Self { seed: 0, rate: 0.0, region, points, reflected: false }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Apply `(x, t) -> (-x, -t)` to every point.
    pub fn reflect(&self) -> Self {
        let mut points: Vec<_> = self.points.iter().map(|p| p.mirrored()).collect();
        sort_points(&mut points);
        Self {
            seed: self.seed,
            rate: self.rate,
            region: self.region.mirrored(),
            points,
            reflected: !self.reflected,
        }
    }

    pub fn contains_point(&self, p: &SpaceTimePoint) -> bool {
        let lo = self.points.partition_point(|q| q.t < p.t);
        self.points[lo..].iter().take_while(|q| q.t == p.t).any(|q| q.x == p.x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let a = make_poisson_cloud(1, 2.0, Region::unit_square()).unwrap();
        let b = make_poisson_cloud(1, 2.0, Region::unit_square()).unwrap();
        assert_eq!(a, b);
        assert!(a.points.windows(2).all(|w| (w[0].t, w[0].x) <= (w[1].t, w[1].x)));
        assert!(a.points.iter().all(|p| a.region.contains(p)));
    }

    #[test]
    fn zero_area_is_empty() {
        let c = make_poisson_cloud(5, 2.0, Region::new(0.0, 0.0, 0.0, 1.0)).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn bad_rate() {
        assert!(make_poisson_cloud(5, 0.0, Region::unit_square()).is_err());
        assert!(make_poisson_cloud(5, f64::NAN, Region::unit_square()).is_err());
    }

    #[test]
    fn reflect_is_involution() {
        let c = make_poisson_cloud(9, 2.0, Region::new(-1.0, 2.0, 0.0, 3.0)).unwrap();
        assert_eq!(c.reflect().reflect(), c);
        let single = PoissonCloud::from_points(Region::unit_square(), vec![SpaceTimePoint::new(0.25, 0.5)]);
        assert_eq!(single.reflect().points, vec![SpaceTimePoint::new(-0.25, -0.5)]);
    }

    #[test]
    fn inversion_small_cases() {
        assert_eq!(invert_poisson(1.0, 0.0), 0);
        assert_eq!(invert_poisson(1.0, 0.5), 1);
        assert_eq!(invert_poisson(1.0, 0.99), 4);
    }

    #[test]
    fn large_mean_count() {
        let c = make_poisson_cloud(3, 2.0, Region::new(0.0, 40.0, 0.0, 40.0)).unwrap();
        let n = c.len() as f64;
        assert!((n - 3200.0).abs() < 6.0 * 3200f64.sqrt());
    }
}
