use model_core::SpaceTimePoint;
use network_classifier::Model;
use passage_engine::{Chain, Side};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coalescence::coalescence_point;
use crate::geometry::{DirectionTarget, Horizons};
use crate::BusemannError;

/// The site where the geodesics from `x` and from the origin merge at the
/// first horizon; both geodesics at the second horizon pass through it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub point: SpaceTimePoint,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusemannPoint {
    pub x: f64,
    /// `L(x -> target) - L(0 -> target)` at the first and second horizon.
    pub values: [f64; 2],
    pub certificate: Option<Certificate>,
}

impl BusemannPoint {
    pub fn certified_value(&self) -> Option<f64> {
        self.certificate.map(|_| self.values[0])
    }
}

/// Geodesics from the origin toward one direction at both horizons.
pub(crate) struct Direction {
    pub targets: [SpaceTimePoint; 2],
    pub chains: [Chain; 2],
}

impl Direction {
    pub fn new(model: Model<'_>, theta: f64, side: Side, hz: &Horizons) -> Result<Self, BusemannError> {
        let origin = hz.origin(model);
        let targets = [
            DirectionTarget::new(model, theta, hz.base, hz.first)?.endpoint,
            DirectionTarget::new(model, theta, hz.base, hz.second)?.endpoint,
        ];
        let chains = [model.geodesic(&origin, &targets[0], side)?, model.geodesic(&origin, &targets[1], side)?];
        Ok(Self { targets, chains })
    }

    pub fn point(&self, model: Model<'_>, x: f64, side: Side, hz: &Horizons) -> Result<BusemannPoint, BusemannError> {
        let start = hz.start(model, x);
        let own = [model.geodesic(&start, &self.targets[0], side)?, model.geodesic(&start, &self.targets[1], side)?];
        let values = [own[0].value - self.chains[0].value, own[1].value - self.chains[1].value];
        let c = coalescence_point(&own[0], &self.chains[0])?;
        let through = |ch: &Chain| ch.graph().contains(&c);
        let certificate = (c.t < hz.base + hz.first && through(&own[1]) && through(&self.chains[1]))
            .then_some(Certificate { point: c, time: c.t });
        Ok(BusemannPoint { x: start.x, values, certificate })
    }
}

/// `B(x) = L(x -> target) - L(0 -> target)` toward `theta` at both horizons.
///
/// `side` picks leftmost or rightmost geodesics for the certificate.
pub fn busemann(model: Model<'_>, theta: f64, x: f64, side: Side, hz: &Horizons) -> Result<BusemannPoint, BusemannError> {
    Direction::new(model, theta, side, hz)?.point(model, x, side, hz)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusemannProfile {
    pub theta: f64,
    pub side: Side,
    pub horizons: Horizons,
    pub points: Vec<BusemannPoint>,
}

impl BusemannProfile {
    pub fn certified_fraction(&self) -> f64 {
        if self.points.is_empty() {
            return 0.0;
        }
        self.points.iter().filter(|p| p.certificate.is_some()).count() as f64 / self.points.len() as f64
    }

    /// `theta,x,value,certified,coalescence_time`, one line per grid point.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("theta,x,value,certified,coalescence_time\n");
        for p in &self.points {
            let c = p.certificate.map_or("NA".to_string(), |c| c.time.to_string());
            s.push_str(&format!("{},{},{},{},{}\n", self.theta, p.x, p.values[0], p.certificate.is_some(), c));
        }
        s
    }
}

pub fn busemann_profile(
    model: Model<'_>,
    theta: f64,
    side: Side,
    xs: &[f64],
    hz: &Horizons,
) -> Result<BusemannProfile, BusemannError> {
    let dir = Direction::new(model, theta, side, hz)?;
    let points: Result<Vec<_>, _> = xs.par_iter().map(|&x| dir.point(model, x, side, hz)).collect();
    Ok(BusemannProfile { theta, side, horizons: *hz, points: points? })
}

/// `L_2(x^2 -> (p_1, p_2)) - L(0 -> p_1) - L(0 -> p_2)` for `θ_1 <= θ_2` at one horizon.
pub fn two_path_busemann(
    model: Model<'_>,
    theta1: f64,
    theta2: f64,
    x: f64,
    base: f64,
    horizon: f64,
) -> Result<Option<f64>, BusemannError> {
    if theta1 > theta2 {
        return Err(BusemannError::Invalid(format!("directions {theta1} > {theta2}")));
    }
    let p1 = DirectionTarget::new(model, theta1, base, horizon)?.endpoint;
    let p2 = DirectionTarget::new(model, theta2, base, horizon)?.endpoint;
    let origin = model.snap(0.0, base);
    let start = model.snap(x, base);
    let Some(l2) = model.disjoint2(&(start, start), &(p1, p2))? else {
        return Ok(None);
    };
    Ok(Some(l2 - model.passage_value(&origin, &p1)? - model.passage_value(&origin, &p2)?))
}

/// For each `m` of `schedule`, the fraction of starts `y < x` whose geodesic
/// toward `theta` merges with the one from `x` more than `m` after the base time.
pub fn anti_coalescence(
    model: Model<'_>,
    theta: f64,
    side: Side,
    x: f64,
    ys: &[f64],
    hz: &Horizons,
    schedule: &[f64],
) -> Result<Vec<(f64, f64)>, BusemannError> {
    let target = DirectionTarget::new(model, theta, hz.base, hz.first)?.endpoint;
    let gx = model.geodesic(&hz.start(model, x), &target, side)?;
    let left: Vec<f64> = ys.iter().copied().filter(|&y| y < x).collect();
    let times: Result<Vec<f64>, BusemannError> = left
        .par_iter()
        .map(|&y| Ok(coalescence_point(&model.geodesic(&hz.start(model, y), &target, side)?, &gx)?.t - hz.base))
        .collect();
    let times = times?;
    Ok(schedule
        .iter()
        .map(|&m| {
            let hit = times.iter().filter(|&&t| t > m).count();
            (m, if times.is_empty() { 0.0 } else { hit as f64 / times.len() as f64 })
        })
        .collect())
}
