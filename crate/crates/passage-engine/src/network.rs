use model_core::SpaceTimePoint;
use serde::{Deserialize, Serialize};

use crate::chain::Chain;

/// Optimal bridges between the leftmost and the rightmost geodesic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Bridges {
    pub left_to_right: bool,
    pub right_to_left: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkEdge {
    pub from: usize,
    pub to: usize,
    /// Sites from `from` to `to`, both included.
    pub segment: Vec<SpaceTimePoint>,
}

/// Union of all geodesics between two points, contracted to branch points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicNetwork {
    pub source: SpaceTimePoint,
    pub sink: SpaceTimePoint,
    pub value: f64,
    /// Index 0 is the source and index 1 the sink; the rest are sorted by `(t, x)`.
    pub vertices: Vec<SpaceTimePoint>,
    pub edges: Vec<NetworkEdge>,
    pub leftmost: Chain,
    pub rightmost: Chain,
    pub bridges: Bridges,
}

impl GeodesicNetwork {
    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.from == v).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.to == v).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }
}

/// Sites lying on some geodesic, with the optimal one-step transitions.
///
/// Nodes are stored in a topological order with the source first and the sink last.
pub(crate) struct OptimalDag {
    pub points: Vec<SpaceTimePoint>,
    pub succ: Vec<Vec<usize>>,
}

impl OptimalDag {
    fn pred_counts(&self) -> Vec<usize> {
        let mut d = vec![0; self.points.len()];
        for s in &self.succ {
            for &j in s {
                d[j] += 1;
            }
        }
        d
    }

    pub fn into_network(self, value: f64, leftmost: Chain, rightmost: Chain) -> GeodesicNetwork {
        let n = self.points.len();
        let (src, snk) = (0, n - 1);
        let indeg = self.pred_counts();
        let is_vertex: Vec<bool> =
            (0..n).map(|i| i == src || i == snk || indeg[i] >= 2 || self.succ[i].len() >= 2).collect();

        let mut order: Vec<usize> = (0..n).filter(|&i| is_vertex[i] && i != src && i != snk).collect();
        order.sort_by(|&a, &b| {
            let (p, q) = (self.points[a], self.points[b]);
            p.t.total_cmp(&q.t).then(p.x.total_cmp(&q.x))
        });
        let mut label = vec![usize::MAX; n];
        label[src] = 0;
        label[snk] = 1;
        for (k, &i) in order.iter().enumerate() {
            label[i] = k + 2;
        }
        let mut vertices = vec![self.points[src], self.points[snk]];
        vertices.extend(order.iter().map(|&i| self.points[i]));

        let mut edges = Vec::new();
        let mut starts = vec![src];
        starts.extend(order.iter().copied());
        for &u in &starts {
            for &first in &self.succ[u] {
                let mut segment = vec![self.points[u], self.points[first]];
                let mut cur = first;
                while !is_vertex[cur] {
                    cur = self.succ[cur][0];
                    segment.push(self.points[cur]);
                }
                edges.push(NetworkEdge { from: label[u], to: label[cur], segment });
            }
        }

        let bridges = self.bridges(&leftmost, &rightmost);
        GeodesicNetwork {
            source: self.points[src],
            sink: self.points[snk],
            value,
            vertices,
            edges,
            leftmost,
            rightmost,
            bridges,
        }
    }

    /// Interior nodes on one extremal geodesic but not the other, and whether an
    /// optimal path leads from the first kind to the second.
    fn bridges(&self, leftmost: &Chain, rightmost: &Chain) -> Bridges {
        let n = self.points.len();
        let on = |c: &Chain| {
            let g = c.graph();
            let mut m = vec![false; n];
            for (i, p) in self.points.iter().enumerate().take(n - 1).skip(1) {
                if g.binary_search_by(|q| q.t.total_cmp(&p.t).then(q.x.total_cmp(&p.x))).is_ok() {
                    m[i] = true;
                }
            }
            m
        };
        let on_l = on(leftmost);
        let on_r = on(rightmost);
        let only_l: Vec<bool> = (0..n).map(|i| on_l[i] && !on_r[i]).collect();
        let only_r: Vec<bool> = (0..n).map(|i| on_r[i] && !on_l[i]).collect();
        Bridges { left_to_right: self.reaches(&only_l, &only_r), right_to_left: self.reaches(&only_r, &only_l) }
    }

    fn reaches(&self, from: &[bool], to: &[bool]) -> bool {
        let n = self.points.len();
        let mut hits = vec![false; n];
        for i in (0..n).rev() {
            hits[i] = self.succ[i].iter().any(|&j| to[j] || hits[j]);
            if from[i] && hits[i] {
                return true;
            }
        }
        false
    }
}
