//! Poisson last passage percolation.
//!
//! The value between two anchors is the largest number of cloud points on a
//! causal chain between them. Anchors are not cloud points; a cloud point that
//! sits exactly on an anchor is counted like any other point of the closed
//! causal diamond.

use model_core::{causal_leq, rotate45, OrderedQuad, PoissonCloud, SpaceTimePoint};

use crate::chain::{position_on, Chain, DisjointPair};
use crate::error::PassageError;
use crate::flow::DagFlow;
use crate::network::{GeodesicNetwork, OptimalDag};
use crate::rsk::greene_partial_sums;
use crate::Side;

/// Pair of anchors at one time, left first; equal anchors form a doubled point.
pub type PointPair = (SpaceTimePoint, SpaceTimePoint);

fn check_connectable(a: &SpaceTimePoint, b: &SpaceTimePoint) -> Result<(), PassageError> {
    if !a.is_finite() || !b.is_finite() {
        return Err(PassageError::Outside("non-finite anchor".into()));
    }
    if causal_leq(a, b) {
        Ok(())
    } else {
        Err(PassageError::NotConnectable { from: format!("{a:?}"), to: format!("{b:?}") })
    }
}

fn uv_order(p: &SpaceTimePoint, q: &SpaceTimePoint) -> std::cmp::Ordering {
    let (pu, pv) = rotate45(p);
    let (qu, qv) = rotate45(q);
    pu.total_cmp(&qu).then(pv.total_cmp(&qv))
}

/// Cloud points in the closed causal diamond of `a` and `b`, sorted by light-cone coordinates.
pub fn diamond_points(cloud: &PoissonCloud, a: &SpaceTimePoint, b: &SpaceTimePoint) -> Vec<SpaceTimePoint> {
    let lo = cloud.points.partition_point(|p| p.t < a.t);
    let hi = cloud.points.partition_point(|p| p.t <= b.t);
    let mut pts: Vec<_> =
        cloud.points[lo..hi].iter().filter(|z| causal_leq(a, z) && causal_leq(z, b)).copied().collect();
    pts.sort_by(uv_order);
    pts
}

/// Prefix maximum over ranks `1..=n`.
struct MaxFenwick {
    tree: Vec<u32>,
}

impl MaxFenwick {
    fn new(n: usize) -> Self {
        Self { tree: vec![0; n + 1] }
    }

    fn update(&mut self, mut i: usize, v: u32) {
        while i < self.tree.len() {
            if self.tree[i] < v {
                self.tree[i] = v;
            }
            i += i & i.wrapping_neg();
        }
    }

    fn query(&self, mut i: usize) -> u32 {
        let mut m = 0;
        while i > 0 {
            m = m.max(self.tree[i]);
            i -= i & i.wrapping_neg();
        }
        m
    }
}

fn ranks(vs: &[f64]) -> (Vec<usize>, usize) {
    let mut sorted = vs.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let r = vs.iter().map(|v| sorted.partition_point(|w| w < v) + 1).collect();
    (r, sorted.len())
}

/// Longest chain ending at each point (`forward`) and starting at each point (`backward`),
/// both counting the point itself, for points sorted by light-cone coordinates.
fn chain_lengths(pts: &[SpaceTimePoint]) -> (Vec<u32>, Vec<u32>) {
    let vs: Vec<f64> = pts.iter().map(|p| rotate45(p).1).collect();
    let (rank, m) = ranks(&vs);
    let mut fw = vec![0; pts.len()];
    let mut tree = MaxFenwick::new(m);
    for i in 0..pts.len() {
        fw[i] = tree.query(rank[i]) + 1;
        tree.update(rank[i], fw[i]);
    }
    let mut bw = vec![0; pts.len()];
    let mut tree = MaxFenwick::new(m);
    for i in (0..pts.len()).rev() {
        let r = m + 1 - rank[i];
        bw[i] = tree.query(r) + 1;
        tree.update(r, bw[i]);
    }
    (fw, bw)
}

/// Number of points on the longest causal chain from `quad.start` to `quad.end`.
pub fn passage_value(cloud: &PoissonCloud, quad: &OrderedQuad) -> Result<f64, PassageError> {
    check_connectable(&quad.start, &quad.end)?;
    let pts = diamond_points(cloud, &quad.start, &quad.end);
    let (fw, _) = chain_lengths(&pts);
    Ok(fw.iter().copied().max().unwrap_or(0) as f64)
}

/// Passage values from `source` to each `(y, t)`; `None` where the target is outside the cone.
pub fn passage_profile(
    cloud: &PoissonCloud,
    source: &SpaceTimePoint,
    t: f64,
    ys: &[f64],
) -> Result<Vec<Option<f64>>, PassageError> {
    if !(t >= source.t) {
        return Err(PassageError::Outside(format!("time {t} before the source")));
    }
    let lo = cloud.points.partition_point(|p| p.t < source.t);
    let hi = cloud.points.partition_point(|p| p.t <= t);
    let pts: Vec<_> = cloud.points[lo..hi].iter().filter(|z| causal_leq(source, z)).copied().collect();
    // Points and targets share one sweep in light-cone order; on ties points go first.
    let mut items: Vec<(f64, u8, f64, usize)> = pts
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (u, v) = rotate45(p);
            (u, 0, v, i)
        })
        .collect();
    for (k, &y) in ys.iter().enumerate() {
        let (u, v) = rotate45(&SpaceTimePoint::new(y, t));
        items.push((u, 1, v, k));
    }
    items.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.total_cmp(&b.2)));
    let vs: Vec<f64> = items.iter().map(|it| it.2).collect();
    let (rank, m) = ranks(&vs);
    let mut tree = MaxFenwick::new(m);
    let mut out = vec![None; ys.len()];
    for (it, &r) in items.iter().zip(&rank) {
        if it.1 == 0 {
            let f = tree.query(r) + 1;
            tree.update(r, f);
        } else {
            let target = SpaceTimePoint::new(ys[it.3], t);
            if causal_leq(source, &target) {
                out[it.3] = Some(tree.query(r) as f64);
            }
        }
    }
    Ok(out)
}

fn chain_from(quad: OrderedQuad, nodes: Vec<SpaceTimePoint>) -> Chain {
    let value = nodes.len() as f64;
    Chain { endpoints: quad, nodes, value }
}

/// Leftmost or rightmost longest chain.
///
/// Read back from the end: among the optimal predecessors, which form an
/// antichain and so are ordered by position, take the leftmost or rightmost.
pub fn geodesic(cloud: &PoissonCloud, quad: &OrderedQuad, side: Side) -> Result<Chain, PassageError> {
    check_connectable(&quad.start, &quad.end)?;
    let pts = diamond_points(cloud, &quad.start, &quad.end);
    let (fw, _) = chain_lengths(&pts);
    Ok(chain_from(*quad, trace(&pts, &fw, quad.end, side)))
}

fn trace(pts: &[SpaceTimePoint], fw: &[u32], end: SpaceTimePoint, side: Side) -> Vec<SpaceTimePoint> {
    let mut need = fw.iter().copied().max().unwrap_or(0);
    let mut cur = end;
    let mut nodes = Vec::with_capacity(need as usize);
    while need > 0 {
        let cands = (0..pts.len()).filter(|&i| fw[i] == need && causal_leq(&pts[i], &cur) && pts[i] != cur);
        let pick = match side {
            Side::Left => cands.min_by(|&a, &b| pts[a].x.total_cmp(&pts[b].x)),
            Side::Right => cands.max_by(|&a, &b| pts[a].x.total_cmp(&pts[b].x)),
        }
        .expect("an optimal predecessor exists");
        cur = pts[pick];
        nodes.push(cur);
        need -= 1;
    }
    nodes.reverse();
    nodes
}

/// Whether `p` lies on some longest chain from `quad.start` to `quad.end`.
pub fn on_optimal(cloud: &PoissonCloud, quad: &OrderedQuad, p: &SpaceTimePoint) -> Result<bool, PassageError> {
    check_connectable(&quad.start, &quad.end)?;
    if !causal_leq(&quad.start, p) || !causal_leq(p, &quad.end) {
        return Ok(false);
    }
    let total = passage_value(cloud, quad)?;
    let w = if cloud.contains_point(p) { 1.0 } else { 0.0 };
    let a = passage_value(cloud, &OrderedQuad { start: quad.start, end: *p })?;
    let b = passage_value(cloud, &OrderedQuad { start: *p, end: quad.end })?;
    Ok(a + b - w == total)
}

pub fn network(cloud: &PoissonCloud, quad: &OrderedQuad) -> Result<GeodesicNetwork, PassageError> {
    check_connectable(&quad.start, &quad.end)?;
    let pts = diamond_points(cloud, &quad.start, &quad.end);
    let (fw, bw) = chain_lengths(&pts);
    let total = fw.iter().copied().max().unwrap_or(0);

    let mut on: Vec<usize> = (0..pts.len()).filter(|&i| fw[i] + bw[i] - 1 == total).collect();
    on.sort_by(|&a, &b| pts[a].t.total_cmp(&pts[b].t).then(pts[a].x.total_cmp(&pts[b].x)));
    // Node 0 is the source, node n-1 the sink; forward and backward counts per node.
    let mut points = vec![quad.start];
    let mut f = vec![0u32];
    let mut b = vec![total];
    for &i in &on {
        points.push(pts[i]);
        f.push(fw[i]);
        b.push(bw[i]);
    }
    points.push(quad.end);
    f.push(total);
    b.push(0);
    let n = points.len();
    let succ = (0..n)
        .map(|i| {
            (i + 1..n)
                .filter(|&j| f[i] + b[j] == total && causal_leq(&points[i], &points[j]))
                .filter(|&j| !(i == 0 && j == n - 1) || total == 0)
                .collect()
        })
        .collect();
    let dag = OptimalDag { points, succ };
    let leftmost = chain_from(*quad, trace(&pts, &fw, quad.end, Side::Left));
    let rightmost = chain_from(*quad, trace(&pts, &fw, quad.end, Side::Right));
    Ok(dag.into_network(total as f64, leftmost, rightmost))
}

/// Partial sums of the RSK shape of the points in the closed causal diamond of `quad`.
///
/// The `j`-th entry is the largest number of points covered by `j` disjoint causal chains.
pub fn greene_values(cloud: &PoissonCloud, quad: &OrderedQuad, k: usize) -> Result<Vec<f64>, PassageError> {
    check_connectable(&quad.start, &quad.end)?;
    let pts = diamond_points(cloud, &quad.start, &quad.end);
    let word: Vec<f64> = pts.iter().map(|p| rotate45(p).1).collect();
    Ok(greene_partial_sums(&word, k).into_iter().map(|s| s as f64).collect())
}

fn check_pair(p: &PointPair) -> Result<(), PassageError> {
    if p.0.t != p.1.t || p.0.x > p.1.x || !p.0.is_finite() || !p.1.is_finite() {
        return Err(PassageError::BadPair(format!("{:?} / {:?}", p.0, p.1)));
    }
    Ok(())
}

struct PairFlow {
    flow: DagFlow,
    pts: Vec<SpaceTimePoint>,
    starts: Vec<SpaceTimePoint>,
    ends: Vec<SpaceTimePoint>,
    source: usize,
    sink: usize,
}

impl PairFlow {
    fn start_node(&self, k: usize) -> usize {
        1 + k
    }
    fn in_node(&self, i: usize) -> usize {
        1 + self.starts.len() + 2 * i
    }
    fn end_node(&self, k: usize) -> usize {
        1 + self.starts.len() + 2 * self.pts.len() + k
    }

    fn build(cloud: &PoissonCloud, start: &PointPair, end: &PointPair) -> Self {
        let starts: Vec<_> = if start.0 == start.1 { vec![start.0] } else { vec![start.0, start.1] };
        let ends: Vec<_> = if end.0 == end.1 { vec![end.0] } else { vec![end.0, end.1] };
        let lo = cloud.points.partition_point(|p| p.t < start.0.t);
        let hi = cloud.points.partition_point(|p| p.t <= end.0.t);
        let mut pts: Vec<_> = cloud.points[lo..hi]
            .iter()
            .filter(|z| starts.iter().any(|s| causal_leq(s, z)) && ends.iter().any(|e| causal_leq(z, e)))
            .copied()
            .collect();
        pts.sort_by(uv_order);
        let n = 2 + starts.len() + 2 * pts.len() + ends.len();
        let mut pf = Self { flow: DagFlow::new(n), pts, starts, ends, source: 0, sink: n - 1 };
        let cap = |count: usize| if count == 1 { 2 } else { 1 };
        for k in 0..pf.starts.len() {
            let node = pf.start_node(k);
            pf.flow.add_edge(pf.source, node, cap(pf.starts.len()), 0);
            for m in 0..pf.ends.len() {
                if causal_leq(&pf.starts[k], &pf.ends[m]) {
                    // Point-free chains share no cloud point, so doubled anchors allow two of them.
                    let e = pf.end_node(m);
                    let c = cap(pf.starts.len()).min(cap(pf.ends.len()));
                    pf.flow.add_edge(node, e, c, 0);
                }
            }
            for i in 0..pf.pts.len() {
                if causal_leq(&pf.starts[k], &pf.pts[i]) {
                    let v = pf.in_node(i);
                    pf.flow.add_edge(node, v, 1, 0);
                }
            }
        }
        for i in 0..pf.pts.len() {
            let (vin, vout) = (pf.in_node(i), pf.in_node(i) + 1);
            pf.flow.add_edge(vin, vout, 1, -1);
            for j in i + 1..pf.pts.len() {
                if causal_leq(&pf.pts[i], &pf.pts[j]) {
                    let w = pf.in_node(j);
                    pf.flow.add_edge(vout, w, 1, 0);
                }
            }
            for m in 0..pf.ends.len() {
                if causal_leq(&pf.pts[i], &pf.ends[m]) {
                    let e = pf.end_node(m);
                    pf.flow.add_edge(vout, e, 1, 0);
                }
            }
        }
        for m in 0..pf.ends.len() {
            let node = pf.end_node(m);
            pf.flow.add_edge(node, pf.sink, cap(pf.ends.len()), 0);
        }
        pf
    }

    /// Peel the two unit paths off the optimal flow.
    fn paths(&mut self) -> Vec<(SpaceTimePoint, Vec<SpaceTimePoint>, SpaceTimePoint)> {
        let first_end = self.end_node(0);
        let first_in = self.in_node(0);
        let mut out = Vec::new();
        for _ in 0..2 {
            let s = self.flow.take_flow_edge(self.source).expect("two units leave the source");
            let anchor = self.starts[s - 1];
            let mut nodes = Vec::new();
            let mut u = s;
            loop {
                let v = self.flow.take_flow_edge(u).expect("flow is conserved");
                if v >= first_end {
                    self.flow.take_flow_edge(v);
                    out.push((anchor, nodes, self.ends[v - first_end]));
                    break;
                }
                let i = (v - first_in) / 2;
                nodes.push(self.pts[i]);
                u = self.flow.take_flow_edge(v).expect("split node carries its unit");
            }
        }
        out
    }
}

/// Largest total point count of two point-disjoint causal chains from the start pair
/// to the end pair; `None` when no two such chains exist.
pub fn disjoint2_value(cloud: &PoissonCloud, start: &PointPair, end: &PointPair) -> Result<Option<f64>, PassageError> {
    check_pair(start)?;
    check_pair(end)?;
    if end.0.t <= start.0.t {
        return Err(PassageError::BadPair("end pair must come after start pair".into()));
    }
    let mut pf = PairFlow::build(cloud, start, end);
    let (flow, cost) = pf.flow.run(pf.source, pf.sink, 2);
    Ok((flow == 2).then_some(-cost as f64))
}

/// An optimal disjoint pair, uncrossed so that the left chain never passes the right one.
///
/// The chains come from the flow decomposition; the `side` argument picks
/// which of the two chains is kept on a tie of positions at the end and
/// does not otherwise make the pair extremal.
pub fn optimizer2(
    cloud: &PoissonCloud,
    start: &PointPair,
    end: &PointPair,
    side: Side,
) -> Result<Option<DisjointPair>, PassageError> {
    check_pair(start)?;
    check_pair(end)?;
    if end.0.t <= start.0.t {
        return Err(PassageError::BadPair("end pair must come after start pair".into()));
    }
    let mut pf = PairFlow::build(cloud, start, end);
    let (flow, cost) = pf.flow.run(pf.source, pf.sink, 2);
    if flow < 2 {
        return Ok(None);
    }
    let mut paths = pf.paths();
    let (b, a) = (paths.pop().unwrap(), paths.pop().unwrap());
    let (mut a, mut b) = if a.0.x <= b.0.x { (a, b) } else { (b, a) };
    if a.0 == b.0 && side == Side::Right {
        std::mem::swap(&mut a, &mut b);
    }
    let (left, right) = uncross(a, b)?;
    debug_assert_eq!((left.nodes.len() + right.nodes.len()) as i64, -cost);
    Ok(Some(DisjointPair { value: -cost as f64, left, right }))
}

type RawPath = (SpaceTimePoint, Vec<SpaceTimePoint>, SpaceTimePoint);

fn polyline(p: &RawPath) -> Vec<SpaceTimePoint> {
    let mut g = vec![p.0];
    g.extend_from_slice(&p.1);
    g.push(p.2);
    g
}

/// First time at which `a` lies strictly to the right of `b`, measured at the
/// preceding zero of `x_a - x_b`.
fn first_violation(a: &RawPath, b: &RawPath) -> Option<f64> {
    let ga = polyline(a);
    let gb = polyline(b);
    let mut times: Vec<f64> = ga.iter().chain(gb.iter()).map(|p| p.t).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let d = |t: f64| position_on(&ga, t).unwrap() - position_on(&gb, t).unwrap();
    let mut prev: Option<(f64, f64)> = None;
    for &t in &times {
        let dt = d(t);
        if dt > 0.0 {
            return Some(match prev {
                None => t,
                Some((t0, d0)) if d0 == 0.0 => t0,
                Some((t0, d0)) => t0 + (t - t0) * d0 / (d0 - dt),
            });
        }
        prev = Some((t, dt));
    }
    None
}

fn uncross(mut a: RawPath, mut b: RawPath) -> Result<(Chain, Chain), PassageError> {
    let cap = 4 * (a.1.len() + b.1.len() + 2);
    let mut swaps = 0;
    while let Some(tau) = first_violation(&a, &b) {
        swaps += 1;
        if swaps > cap {
            return Err(PassageError::Uncross(cap));
        }
        let split = |p: &RawPath| {
            let k = p.1.partition_point(|q| q.t <= tau);
            (p.1[..k].to_vec(), p.1[k..].to_vec())
        };
        let (a_head, a_tail) = split(&a);
        let (b_head, b_tail) = split(&b);
        let na = (a.0, [a_head, b_tail].concat(), b.2);
        let nb = (b.0, [b_head, a_tail].concat(), a.2);
        a = na;
        b = nb;
    }
    let to_chain = |p: RawPath| chain_from(OrderedQuad { start: p.0, end: p.2 }, p.1);
    Ok((to_chain(a), to_chain(b)))
}

/// `2 d - d_2` between doubled anchors; the disjoint value is the second Greene sum.
pub fn gap(cloud: &PoissonCloud, quad: &OrderedQuad) -> Result<f64, PassageError> {
    let g = greene_values(cloud, quad, 2)?;
    Ok(2.0 * g[0] - g[1])
}
