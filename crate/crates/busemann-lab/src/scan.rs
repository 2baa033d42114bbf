use std::collections::HashMap;

use network_classifier::Model;
use passage_engine::{Chain, Side};
use serde::{Deserialize, Serialize};

use crate::geometry::DirectionTarget;
use crate::BusemannError;

/// Jumps must exceed this many `(mid - base)^{2/3}` units.
pub const DEFAULT_THRESHOLD: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub window: (f64, f64),
    pub steps: usize,
    pub base: f64,
    pub horizon: f64,
    /// Absolute time at which geodesic positions are compared.
    pub mid_time: f64,
    pub threshold: f64,
}

impl ScanSpec {
    pub fn new(window: (f64, f64), steps: usize, base: f64, horizon: f64) -> Self {
        Self { window, steps, base, horizon, mid_time: base + horizon / 2.0, threshold: DEFAULT_THRESHOLD }
    }

    pub fn threshold_distance(&self) -> f64 {
        self.threshold * (self.mid_time - self.base).powf(2.0 / 3.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalDirection {
    pub theta: f64,
    pub theta_below: f64,
    pub theta_above: f64,
    /// Sides of the witness geodesics toward `theta_below` and `theta_above`:
    /// `(Right, Left)` for a jump between two directions, `(Left, Right)` for
    /// a split of the geodesics toward the single direction `theta`.
    pub sides: (Side, Side),
    /// Witness geodesic from the origin toward `theta_below`.
    pub below: Chain,
    /// Witness geodesic from the origin toward `theta_above`.
    pub above: Chain,
    /// `above - below` at the mid time.
    pub separation: f64,
}

impl ExceptionalDirection {
    pub fn is_tie(&self) -> bool {
        self.theta_below == self.theta_above
    }
}

struct Prober<'a, 'm> {
    model: Model<'m>,
    spec: &'a ScanSpec,
    cache: HashMap<(u64, Side), Chain>,
}

impl Prober<'_, '_> {
    fn target_x(&self, theta: f64) -> Result<f64, BusemannError> {
        Ok(DirectionTarget::new(self.model, theta, self.spec.base, self.spec.horizon)?.endpoint.x)
    }

    fn chain(&mut self, theta: f64, side: Side) -> Result<Chain, BusemannError> {
        let key = (theta.to_bits(), side);
        if let Some(c) = self.cache.get(&key) {
            return Ok(c.clone());
        }
        let origin = self.model.snap(0.0, self.spec.base);
        let target = DirectionTarget::new(self.model, theta, self.spec.base, self.spec.horizon)?.endpoint;
        let c = self.model.geodesic(&origin, &target, side)?;
        self.cache.insert(key, c.clone());
        Ok(c)
    }

    fn mid(&mut self, theta: f64, side: Side) -> Result<f64, BusemannError> {
        let c = self.chain(theta, side)?;
        Ok(c.position_at(self.spec.mid_time).expect("mid time inside the horizon"))
    }

    /// Rightmost position toward `b` minus leftmost position toward `a`.
    fn spread(&mut self, a: f64, b: f64) -> Result<f64, BusemannError> {
        Ok(self.mid(b, Side::Right)? - self.mid(a, Side::Left)?)
    }

    /// Leftmost position toward `b` minus rightmost position toward `a`.
    fn jump(&mut self, a: f64, b: f64) -> Result<f64, BusemannError> {
        Ok(self.mid(b, Side::Left)? - self.mid(a, Side::Right)?)
    }

    fn resolved(&self, a: f64, b: f64) -> Result<bool, BusemannError> {
        Ok(match self.model {
            Model::Lattice(_) => self.target_x(b)? - self.target_x(a)? <= 2.0,
            Model::Poisson(_) => (b - a) * self.spec.horizon <= 1e-9,
        })
    }

    fn tie(&mut self, theta: f64) -> Result<ExceptionalDirection, BusemannError> {
        Ok(ExceptionalDirection {
            theta,
            theta_below: theta,
            theta_above: theta,
            sides: (Side::Left, Side::Right),
            below: self.chain(theta, Side::Left)?,
            above: self.chain(theta, Side::Right)?,
            separation: self.spread(theta, theta)?,
        })
    }

    /// The exceptional direction inside a bracket whose spread exceeds `thr`, if any.
    fn refine(&mut self, mut a: f64, mut b: f64, thr: f64) -> Result<Option<ExceptionalDirection>, BusemannError> {
        for _ in 0..64 {
            if self.resolved(a, b)? {
                break;
            }
            let m = 0.5 * (a + b);
            if self.spread(m, m)? > thr {
                return Ok(Some(self.tie(m)?));
            }
            if self.spread(a, m)? >= self.spread(m, b)? {
                b = m;
            } else {
                a = m;
            }
        }
        for t in [a, b] {
            if self.spread(t, t)? > thr {
                return Ok(Some(self.tie(t)?));
            }
        }
        let separation = self.jump(a, b)?;
        if separation <= thr {
            return Ok(None);
        }
        Ok(Some(ExceptionalDirection {
            theta: 0.5 * (a + b),
            theta_below: a,
            theta_above: b,
            sides: (Side::Right, Side::Left),
            below: self.chain(a, Side::Right)?,
            above: self.chain(b, Side::Left)?,
            separation,
        }))
    }
}

fn same_witnesses(a: &ExceptionalDirection, b: &ExceptionalDirection) -> bool {
    a.sides == b.sides && a.below.endpoints == b.below.endpoints && a.above.endpoints == b.above.endpoints
}

/// Directions where the mid-time geodesic position jumps by more than the threshold.
///
/// Brackets of a uniform grid over the window whose spread of mid-time
/// positions exceeds the threshold are refined by bisection, keeping the half
/// with the larger spread, down to neighbouring sites. A direction whose own
/// leftmost and rightmost geodesics are far apart is reported as a tie. The
/// result is sorted by direction.
pub fn exceptional_scan(model: Model<'_>, spec: &ScanSpec) -> Result<Vec<ExceptionalDirection>, BusemannError> {
    if spec.steps == 0 || !(spec.window.0 < spec.window.1) {
        return Err(BusemannError::Invalid(format!("scan window {:?} with {} steps", spec.window, spec.steps)));
    }
    if !(spec.mid_time > spec.base && spec.mid_time < spec.base + spec.horizon) {
        return Err(BusemannError::Invalid(format!("mid time {} outside the horizon", spec.mid_time)));
    }
    let thr = spec.threshold_distance();
    let mut p = Prober { model, spec, cache: HashMap::new() };
    let (lo, hi) = spec.window;
    let grid: Vec<f64> = (0..=spec.steps).map(|k| lo + (hi - lo) * k as f64 / spec.steps as f64).collect();
    let mut found: Vec<ExceptionalDirection> = Vec::new();
    for w in grid.windows(2) {
        if p.spread(w[0], w[1])? <= thr {
            continue;
        }
        if let Some(e) = p.refine(w[0], w[1], thr)? {
            if !found.iter().any(|f| same_witnesses(f, &e)) {
                found.push(e);
            }
        }
    }
    found.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    Ok(found)
}

