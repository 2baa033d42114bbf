use serde::{Deserialize, Serialize};

use crate::error::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimePoint {
    pub x: f64,
    pub t: f64,
}

impl SpaceTimePoint {
    pub fn new(x: f64, t: f64) -> Self {
        Self { x, t }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.t.is_finite()
    }

    /// Mirror through the origin, `(x, t) -> (-x, -t)`.
    pub fn mirrored(&self) -> Self {
        Self { x: -self.x, t: -self.t }
    }
}

/// A start and an end point with `start.t < end.t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderedQuad {
    pub start: SpaceTimePoint,
    pub end: SpaceTimePoint,
}

impl OrderedQuad {
    pub fn new(start: SpaceTimePoint, end: SpaceTimePoint) -> Result<Self, ModelError> {
        if !start.is_finite() || !end.is_finite() {
            return Err(ModelError::NonFinite);
        }
        if start.t >= end.t {
            return Err(ModelError::Unordered { start: start.t, end: end.t });
        }
        Ok(Self { start, end })
    }

    pub fn duration(&self) -> f64 {
        self.end.t - self.start.t
    }

    /// The quad seen through `(x, t) -> (-x, -t)`: start and end swap roles.
    pub fn mirrored(&self) -> Self {
        Self { start: self.end.mirrored(), end: self.start.mirrored() }
    }
}

/// Axis-aligned rectangle `[x_min, x_max] x [t_min, t_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x_min: f64,
    pub x_max: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl Region {
    pub fn new(x_min: f64, x_max: f64, t_min: f64, t_max: f64) -> Self {
        Self { x_min, x_max, t_min, t_max }
    }

    pub fn unit_square() -> Self {
        Self::new(0.0, 1.0, 0.0, 1.0)
    }

    pub fn width(&self) -> f64 {
        (self.x_max - self.x_min).max(0.0)
    }

    pub fn height(&self) -> f64 {
        (self.t_max - self.t_min).max(0.0)
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: &SpaceTimePoint) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.t >= self.t_min && p.t <= self.t_max
    }

    pub fn mirrored(&self) -> Self {
        Self::new(-self.x_max, -self.x_min, -self.t_max, -self.t_min)
    }

    /// Smallest rectangle holding the causal diamond between two points.
    pub fn diamond_hull(a: SpaceTimePoint, b: SpaceTimePoint) -> Self {
        let dt = b.t - a.t;
        Self::new((a.x + b.x - dt) / 2.0, (a.x + b.x + dt) / 2.0, a.t, b.t)
    }
}

/// `p` can reach `q` by a path of slope at most one.
pub fn causal_leq(p: &SpaceTimePoint, q: &SpaceTimePoint) -> bool {
    let dt = q.t - p.t;
    dt >= 0.0 && (q.x - p.x).abs() <= dt
}

/// Light-cone coordinates `(u, v) = (t + x, t - x)`.
pub fn rotate45(p: &SpaceTimePoint) -> (f64, f64) {
    (p.t + p.x, p.t - p.x)
}

/// Inverse of [`rotate45`].
pub fn unrotate45(u: f64, v: f64) -> SpaceTimePoint {
    SpaceTimePoint { x: (u - v) / 2.0, t: (u + v) / 2.0 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, t: f64) -> SpaceTimePoint {
        SpaceTimePoint::new(x, t)
    }

    #[test]
    fn causal_examples() {
        assert!(causal_leq(&p(0.0, 0.0), &p(0.1, 0.5)));
        assert!(!causal_leq(&p(0.1, 0.5), &p(-0.3, 0.8)));
        assert!(causal_leq(&p(0.3, 0.2), &p(0.3, 0.2)));
    }

    #[test]
    fn rotate_examples() {
        assert_eq!(rotate45(&p(0.0, 0.0)), (0.0, 0.0));
        let (u, v) = rotate45(&p(0.1, 0.5));
        assert!((u - 0.6).abs() < 1e-15 && (v - 0.4).abs() < 1e-15);
        let back = unrotate45(u, v);
        assert!((back.x - 0.1).abs() < 1e-15 && (back.t - 0.5).abs() < 1e-15);
    }

    #[test]
    fn quad_rejects_backwards_time() {
        assert!(OrderedQuad::new(p(0.0, 1.0), p(0.0, 1.0)).is_err());
        assert!(OrderedQuad::new(p(0.0, 0.0), p(f64::NAN, 1.0)).is_err());
        assert!(OrderedQuad::new(p(0.0, 0.0), p(5.0, 1.0)).is_ok());
    }

    #[test]
    fn diamond_hull_covers_cone() {
        let r = Region::diamond_hull(p(0.0, 0.0), p(0.0, 2.0));
        assert_eq!((r.x_min, r.x_max), (-1.0, 1.0));
        let r = Region::diamond_hull(p(0.0, 0.0), p(1.0, 1.0));
        assert_eq!((r.x_min, r.x_max), (0.0, 1.0));
    }
}
