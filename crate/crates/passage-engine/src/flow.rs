//! Successive shortest paths for small integral min-cost flows on DAGs.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: i64,
    cost: i64,
}

/// Nodes must be numbered so that every positive-capacity edge goes from a
/// lower to a higher index; initial potentials come from one pass in that order.
#[derive(Debug, Clone)]
pub struct DagFlow {
    adj: Vec<Vec<usize>>,
    edges: Vec<Edge>,
}

impl DagFlow {
    pub fn new(n: usize) -> Self {
        Self { adj: vec![Vec::new(); n], edges: Vec::new() }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64, cost: i64) -> usize {
        debug_assert!(from < to, "edges must respect the topological numbering");
        let id = self.edges.len();
        self.edges.push(Edge { to, cap, cost });
        self.edges.push(Edge { to: from, cap: 0, cost: -cost });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    pub fn flow_on(&self, edge: usize) -> i64 {
        self.edges[edge ^ 1].cap
    }

    /// Send up to `limit` units from `s` to `t` at least cost. Returns `(flow, cost)`.
    pub fn run(&mut self, s: usize, t: usize, limit: i64) -> (i64, i64) {
        const INF: i64 = i64::MAX / 4;
        let n = self.adj.len();
        let mut pot = vec![INF; n];
        pot[s] = 0;
        for u in 0..n {
            if pot[u] == INF {
                continue;
            }
            for &e in &self.adj[u] {
                let ed = &self.edges[e];
                if ed.cap > 0 && pot[u] + ed.cost < pot[ed.to] {
                    pot[ed.to] = pot[u] + ed.cost;
                }
            }
        }
        let (mut flow, mut cost) = (0, 0);
        let mut dist = vec![INF; n];
        let mut prev = vec![usize::MAX; n];
        while flow < limit {
            dist.iter_mut().for_each(|d| *d = INF);
            prev.iter_mut().for_each(|p| *p = usize::MAX);
            dist[s] = 0;
            let mut heap = BinaryHeap::new();
            heap.push(Reverse((0i64, s)));
            while let Some(Reverse((d, u))) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for &e in &self.adj[u] {
                    let ed = &self.edges[e];
                    if ed.cap <= 0 || pot[ed.to] == INF {
                        continue;
                    }
                    let nd = d + ed.cost + pot[u] - pot[ed.to];
                    if nd < dist[ed.to] {
                        dist[ed.to] = nd;
                        prev[ed.to] = e;
                        heap.push(Reverse((nd, ed.to)));
                    }
                }
            }
            if dist[t] == INF {
                break;
            }
            for v in 0..n {
                if dist[v] < INF {
                    pot[v] += dist[v];
                }
            }
            let mut push = limit - flow;
            let mut v = t;
            while v != s {
                let e = prev[v];
                push = push.min(self.edges[e].cap);
                v = self.edges[e ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let e = prev[v];
                self.edges[e].cap -= push;
                self.edges[e ^ 1].cap += push;
                cost += push * self.edges[e].cost;
                v = self.edges[e ^ 1].to;
            }
            flow += push;
        }
        (flow, cost)
    }

    /// Successor of `u` along an edge carrying flow, consuming one unit of it.
    pub fn take_flow_edge(&mut self, u: usize) -> Option<usize> {
        for &e in &self.adj[u] {
            if e % 2 == 0 && self.edges[e ^ 1].cap > 0 {
                self.edges[e ^ 1].cap -= 1;
                return Some(self.edges[e].to);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_disjoint_routes() {
        // 0 -> {1,2} -> 3, with the cheaper route through 1 usable once.
        let mut f = DagFlow::new(4);
        f.add_edge(0, 1, 1, -5);
        f.add_edge(0, 2, 2, -1);
        f.add_edge(1, 3, 2, 0);
        f.add_edge(2, 3, 2, 0);
        assert_eq!(f.run(0, 3, 2), (2, -6));
    }

    #[test]
    fn rerouting_through_reverse_edge() {
        // Greedy first path 0-1-2-3 blocks both others; optimum uses 0-1-3 and 0-2-3.
        let mut f = DagFlow::new(4);
        f.add_edge(0, 1, 1, -1);
        f.add_edge(0, 2, 1, 0);
        f.add_edge(1, 2, 1, -10);
        f.add_edge(1, 3, 1, 0);
        f.add_edge(2, 3, 1, -1);
        let (flow, cost) = f.run(0, 3, 2);
        assert_eq!(flow, 2);
        assert_eq!(cost, -2);
    }
}
