use model_core::{causal_leq, rotate45, Cell, LatticeField, OrderedQuad, PoissonCloud, SpaceTimePoint};
use passage_engine::{Chain, DisjointPair};

use crate::{Instance, OracleError};

#[derive(Debug, Clone, PartialEq)]
pub struct EnumerationResult {
    /// Every path or causal chain of the single-path question.
    pub chains: Vec<Chain>,
    pub optimum: f64,
    /// Every ordered disjoint pair attaining `pair_optimum`.
    pub optimal_pairs: Vec<DisjointPair>,
    /// `None` when no disjoint pair exists.
    pub pair_optimum: Option<f64>,
}

fn lattice_paths(field: &LatticeField, a: Cell, b: Cell) -> Vec<Vec<Cell>> {
    fn rec(b: Cell, cur: &mut Vec<Cell>, out: &mut Vec<Vec<Cell>>) {
        let c = *cur.last().unwrap();
        if c == b {
            out.push(cur.clone());
            return;
        }
        for next in [Cell::new(c.row + 1, c.col), Cell::new(c.row, c.col + 1)] {
            if next.row <= b.row && next.col <= b.col {
                cur.push(next);
                rec(b, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if a.row <= b.row && a.col <= b.col && field.contains(a) && field.contains(b) {
        rec(b, &mut vec![a], &mut out);
    }
    out
}

fn lattice_chain(field: &LatticeField, cells: &[Cell]) -> Chain {
    let start = cells[0].point();
    let end = cells.last().unwrap().point();
    Chain {
        endpoints: OrderedQuad { start, end },
        nodes: cells.iter().map(|c| c.point()).collect(),
        value: cells.iter().map(|&c| field.weight(c)).sum(),
    }
}

/// Every causal chain of cloud points between two anchors, as index lists into `pts`.
fn cloud_chains(pts: &[SpaceTimePoint], a: &SpaceTimePoint, b: &SpaceTimePoint) -> Vec<Vec<usize>> {
    let inside: Vec<usize> = (0..pts.len()).filter(|&i| causal_leq(a, &pts[i]) && causal_leq(&pts[i], b)).collect();
    let mut out = vec![Vec::new()];
    fn rec(pts: &[SpaceTimePoint], inside: &[usize], from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        for k in from..inside.len() {
            let i = inside[k];
            if cur.last().is_none_or(|&j| causal_leq(&pts[j], &pts[i])) {
                cur.push(i);
                out.push(cur.clone());
                rec(pts, inside, k + 1, cur, out);
                cur.pop();
            }
        }
    }
    rec(pts, &inside, 0, &mut Vec::new(), &mut out);
    out
}

fn cloud_sorted(cloud: &PoissonCloud) -> Vec<SpaceTimePoint> {
    let mut pts = cloud.points.clone();
    pts.sort_by(|p, q| {
        let (pu, pv) = rotate45(p);
        let (qu, qv) = rotate45(q);
        pu.total_cmp(&qu).then(pv.total_cmp(&qv))
    });
    pts
}

fn cloud_chain(pts: &[SpaceTimePoint], idx: &[usize], a: SpaceTimePoint, b: SpaceTimePoint) -> Chain {
    Chain { endpoints: OrderedQuad { start: a, end: b }, nodes: idx.iter().map(|&i| pts[i]).collect(), value: idx.len() as f64 }
}

/// Whether `a` is weakly left of `b` at every common time.
pub fn weakly_left(a: &Chain, b: &Chain) -> bool {
    let (ga, gb) = (a.graph(), b.graph());
    let lo = a.start_time().max(b.start_time());
    let hi = a.end_time().min(b.end_time());
    ga.iter().chain(gb.iter()).map(|p| p.t).filter(|&t| t >= lo && t <= hi).all(|t| {
        match (a.position_at(t), b.position_at(t)) {
            (Some(x), Some(y)) => x <= y,
            _ => true,
        }
    })
}

/// All paths or chains from `start.0` to `end.0` with the best value.
pub fn enumerate_paths(inst: &Instance) -> Result<EnumerationResult, OracleError> {
    inst.check_size()?;
    let chains: Vec<Chain> = match inst {
        Instance::Lattice { field, start, end } => {
            lattice_paths(field, start.0, end.0).iter().map(|p| lattice_chain(field, p)).collect()
        }
        Instance::Cloud { cloud, start, end } => {
            if !causal_leq(&start.0, &end.0) {
                Vec::new()
            } else {
                let pts = cloud_sorted(cloud);
                cloud_chains(&pts, &start.0, &end.0).iter().map(|c| cloud_chain(&pts, c, start.0, end.0)).collect()
            }
        }
    };
    if chains.is_empty() {
        return Err(OracleError::Invalid("end not reachable from start".into()));
    }
    let optimum = chains.iter().map(|c| c.value).fold(f64::NEG_INFINITY, f64::max);
    Ok(EnumerationResult { chains, optimum, optimal_pairs: Vec::new(), pair_optimum: None })
}

/// Both legs of every candidate pair, with the sites each leg may not share.
struct Legs {
    left: Vec<(Chain, Vec<u64>)>,
    right: Vec<(Chain, Vec<u64>)>,
    /// Weight of each site, by the bit position used in the masks.
    site_weight: Vec<f64>,
}

fn mask_of(bits: &[usize]) -> Vec<u64> {
    let mut m = vec![0u64; 1];
    for &b in bits {
        if b / 64 >= m.len() {
            m.resize(b / 64 + 1, 0);
        }
        m[b / 64] |= 1 << (b % 64);
    }
    m
}

fn masks_meet(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

fn shared_weight(a: &[u64], b: &[u64], w: &[f64]) -> f64 {
    let mut s = 0.0;
    for (k, (x, y)) in a.iter().zip(b).enumerate() {
        let mut m = x & y;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            s += w[64 * k + i];
            m &= m - 1;
        }
    }
    s
}

fn legs(inst: &Instance) -> Legs {
    match inst {
        Instance::Lattice { field, start, end } => {
            let site = |c: Cell| c.row * field.cols + c.col;
            let site_weight = (0..field.rows * field.cols).map(|i| field.weight(Cell::new(i / field.cols, i % field.cols))).collect();
            // Doubled anchors are the only sites the legs may share.
            let shared_ok = |c: Cell| (start.0 == start.1 && c == start.0) || (end.0 == end.1 && c == end.0);
            let build = |a: Cell, b: Cell| {
                lattice_paths(field, a, b)
                    .iter()
                    .map(|p| {
                        let bits: Vec<usize> = p.iter().filter(|&&c| !shared_ok(c)).map(|&c| site(c)).collect();
                        (lattice_chain(field, p), mask_of(&bits))
                    })
                    .collect()
            };
            Legs { left: build(start.0, end.0), right: build(start.1, end.1), site_weight }
        }
        Instance::Cloud { cloud, start, end } => {
            let pts = cloud_sorted(cloud);
            let build = |a: SpaceTimePoint, b: SpaceTimePoint| {
                if !causal_leq(&a, &b) {
                    return Vec::new();
                }
                cloud_chains(&pts, &a, &b).iter().map(|c| (cloud_chain(&pts, c, a, b), mask_of(c))).collect()
            };
            Legs { left: build(start.0, end.0), right: build(start.1, end.1), site_weight: vec![1.0; pts.len()] }
        }
    }
}

fn by_value_desc(v: &mut [(Chain, Vec<u64>)]) {
    v.sort_by(|a, b| b.0.value.total_cmp(&a.0.value));
}

/// Every disjoint pair with the best combined value, ordered left to right.
///
/// The optimum is taken over all disjoint pairs, ordered or not; the returned
/// argmax set keeps the ordered ones.
pub fn enumerate_disjoint_pairs(inst: &Instance) -> Result<EnumerationResult, OracleError> {
    inst.check_size()?;
    let mut res = enumerate_paths(inst).unwrap_or(EnumerationResult {
        chains: Vec::new(),
        optimum: f64::NEG_INFINITY,
        optimal_pairs: Vec::new(),
        pair_optimum: None,
    });
    let mut lg = legs(inst);
    by_value_desc(&mut lg.left);
    by_value_desc(&mut lg.right);
    let identical_forbidden = matches!(inst, Instance::Lattice { .. });
    let mut best = f64::NEG_INFINITY;
    let mut argmax = Vec::new();
    let top_right = lg.right.first().map_or(f64::NEG_INFINITY, |r| r.0.value);
    for (a, ma) in &lg.left {
        if a.value + top_right < best {
            break;
        }
        for (b, mb) in &lg.right {
            let v = a.value + b.value;
            if v < best {
                break;
            }
            if masks_meet(ma, mb) || (identical_forbidden && a.nodes == b.nodes) {
                continue;
            }
            if v > best {
                best = v;
                argmax.clear();
            }
            if weakly_left(a, b) {
                argmax.push(DisjointPair { left: a.clone(), right: b.clone(), value: v });
            }
        }
    }
    if best > f64::NEG_INFINITY {
        if argmax.is_empty() {
            return Err(OracleError::Invalid("optimal pairs exist but none is ordered".into()));
        }
        res.pair_optimum = Some(best);
        res.optimal_pairs = argmax;
    }
    Ok(res)
}

/// Best weakly ordered pair, with shared sites other than doubled anchors counted once.
pub fn weak_pair_value(inst: &Instance) -> Result<Option<f64>, OracleError> {
    inst.check_size()?;
    let mut lg = legs(inst);
    by_value_desc(&mut lg.left);
    by_value_desc(&mut lg.right);
    let mut best: Option<f64> = None;
    for (a, ma) in &lg.left {
        for (b, mb) in &lg.right {
            if best.is_some_and(|v| a.value + b.value <= v) {
                break;
            }
            if !weakly_left(a, b) {
                continue;
            }
            let v = a.value + b.value - shared_weight(ma, mb, &lg.site_weight);
            if best.is_none_or(|w| v > w) {
                best = Some(v);
            }
        }
    }
    Ok(best)
}

/// Source, sink and branch points of the union of all optimal paths from `start.0` to `end.0`.
pub fn network_vertices(inst: &Instance) -> Result<Vec<SpaceTimePoint>, OracleError> {
    let res = enumerate_paths(inst)?;
    let quad = inst.quad();
    let mut edges: Vec<(SpaceTimePoint, SpaceTimePoint)> = Vec::new();
    for c in res.chains.iter().filter(|c| c.value == res.optimum) {
        let g = c.graph();
        // A chain whose graph collapses to one site still links the anchors.
        let g = if g.len() == 1 { vec![quad.start, quad.end] } else { g };
        for w in g.windows(2) {
            if !edges.contains(&(w[0], w[1])) {
                edges.push((w[0], w[1]));
            }
        }
    }
    let mut v = vec![quad.start, quad.end];
    let mut nodes: Vec<SpaceTimePoint> = edges.iter().flat_map(|e| [e.0, e.1]).collect();
    nodes.sort_by(|p, q| p.t.total_cmp(&q.t).then(p.x.total_cmp(&q.x)));
    nodes.dedup();
    for p in nodes {
        if p == quad.start || p == quad.end {
            continue;
        }
        let out = edges.iter().filter(|e| e.0 == p).count();
        let inn = edges.iter().filter(|e| e.1 == p).count();
        if out >= 2 || inn >= 2 {
            v.push(p);
        }
    }
    Ok(v)
}
