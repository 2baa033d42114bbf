use model_core::{OrderedQuad, SpaceTimePoint};
use serde::{Deserialize, Serialize};

/// A directed path recorded by the environment sites it visits.
///
/// Lattice chains list every cell including both ends. Poisson chains list
/// the cloud points only; the anchors sit in `endpoints`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub endpoints: OrderedQuad,
    pub nodes: Vec<SpaceTimePoint>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisjointPair {
    pub left: Chain,
    pub right: Chain,
    pub value: f64,
}

/// Sorted, disjoint closed time intervals; a single time is `(t, t)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OverlapInterval {
    pub intervals: Vec<(f64, f64)>,
}

impl OverlapInterval {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }
}

impl Chain {
    /// Polyline vertices: anchors plus nodes, without repeats.
    pub fn graph(&self) -> Vec<SpaceTimePoint> {
        let mut g = Vec::with_capacity(self.nodes.len() + 2);
        if self.nodes.first() != Some(&self.endpoints.start) {
            g.push(self.endpoints.start);
        }
        g.extend_from_slice(&self.nodes);
        if self.nodes.last() != Some(&self.endpoints.end) {
            g.push(self.endpoints.end);
        }
        g
    }

    /// Position of the linearly interpolated graph at time `t`.
    pub fn position_at(&self, t: f64) -> Option<f64> {
        position_on(&self.graph(), t)
    }

    pub fn start_time(&self) -> f64 {
        self.endpoints.start.t
    }

    pub fn end_time(&self) -> f64 {
        self.endpoints.end.t
    }
}

pub(crate) fn position_on(g: &[SpaceTimePoint], t: f64) -> Option<f64> {
    let first = g.first()?;
    let last = g.last()?;
    if t < first.t || t > last.t {
        return None;
    }
    let k = g.partition_point(|p| p.t < t);
    let p = g[k];
    if p.t == t {
        return Some(p.x);
    }
    let q = g[k - 1];
    Some(q.x + (p.x - q.x) * (t - q.t) / (p.t - q.t))
}

/// Closure of the set of times at which the two graphs coincide.
pub fn overlap(a: &Chain, b: &Chain) -> OverlapInterval {
    let ga = a.graph();
    let gb = b.graph();
    let lo = a.start_time().max(b.start_time());
    let hi = a.end_time().min(b.end_time());
    if lo > hi {
        return OverlapInterval::default();
    }
    let mut times: Vec<f64> = ga.iter().chain(gb.iter()).map(|p| p.t).filter(|t| *t >= lo && *t <= hi).collect();
    times.push(lo);
    times.push(hi);
    times.sort_by(f64::total_cmp);
    times.dedup();

    let diff = |t: f64| position_on(&ga, t).unwrap() - position_on(&gb, t).unwrap();
    let mut raw: Vec<(f64, f64)> = Vec::new();
    let d: Vec<f64> = times.iter().map(|&t| diff(t)).collect();
    for (i, &t) in times.iter().enumerate() {
        if d[i] == 0.0 {
            raw.push((t, t));
        }
        if i + 1 < times.len() {
            let (t1, d0, d1) = (times[i + 1], d[i], d[i + 1]);
            if d0 == 0.0 && d1 == 0.0 {
                raw.push((t, t1));
            } else if d0 * d1 < 0.0 {
                let c = t + (t1 - t) * d0 / (d0 - d1);
                raw.push((c, c));
            }
        }
    }
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (s, e) in raw {
        match merged.last_mut() {
            Some(last) if s <= last.1 => last.1 = last.1.max(e),
            _ => merged.push((s, e)),
        }
    }
    OverlapInterval { intervals: merged }
}
