//! Lattice last passage percolation.
//!
//! Paths move down or right and collect the weight of every cell they visit,
//! both endpoints included. Internally a cell is addressed by its time
//! `t = row + col` and its column `j`; a step keeps `j` (down) or adds one (right).

use model_core::{Cell, LatticeField, OrderedQuad};

use crate::chain::{Chain, DisjointPair};
use crate::error::PassageError;
use crate::network::{GeodesicNetwork, OptimalDag};
use crate::{same_value, Side};

const NEG: f64 = f64::NEG_INFINITY;

#[inline(always)]
fn mx(a: f64, b: f64) -> f64 {
    if a > b {
        a
    } else {
        b
    }
}

fn check_cell(field: &LatticeField, c: Cell) -> Result<(), PassageError> {
    if field.contains(c) {
        Ok(())
    } else {
        Err(PassageError::Outside(format!("{c:?} in {}x{} field", field.rows, field.cols)))
    }
}

fn check_quad(field: &LatticeField, a: Cell, b: Cell) -> Result<(), PassageError> {
    check_cell(field, a)?;
    check_cell(field, b)?;
    if a.row > b.row || a.col > b.col {
        return Err(PassageError::NotConnectable { from: format!("{a:?}"), to: format!("{b:?}") });
    }
    Ok(())
}

/// Dynamic programming table over a cone of cells, one column window per time.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub t0: usize,
    pub t1: usize,
    lo: Vec<usize>,
    hi: Vec<usize>,
    start: Vec<usize>,
    vals: Vec<f64>,
}

impl Sweep {
    fn with_windows(t0: usize, t1: usize, windows: Vec<(usize, usize)>) -> Self {
        let mut start = Vec::with_capacity(windows.len());
        let mut total = 0;
        for &(lo, hi) in &windows {
            start.push(total);
            if lo <= hi {
                total += hi - lo + 1;
            }
        }
        let (lo, hi) = windows.into_iter().unzip();
        Self { t0, t1, lo, hi, start, vals: vec![NEG; total] }
    }

    #[inline]
    pub fn get(&self, t: usize, j: usize) -> f64 {
        if t < self.t0 || t > self.t1 {
            return NEG;
        }
        let k = t - self.t0;
        if j < self.lo[k] || j > self.hi[k] {
            NEG
        } else {
            self.vals[self.start[k] + j - self.lo[k]]
        }
    }

    #[inline]
    fn set(&mut self, t: usize, j: usize, v: f64) {
        let k = t - self.t0;
        let i = self.start[k] + j - self.lo[k];
        self.vals[i] = v;
    }

    /// Inclusive column window stored for time `t`, `None` when empty.
    pub fn window(&self, t: usize) -> Option<(usize, usize)> {
        if t < self.t0 || t > self.t1 {
            return None;
        }
        let k = t - self.t0;
        (self.lo[k] <= self.hi[k]).then(|| (self.lo[k], self.hi[k]))
    }
}

fn field_window(field: &LatticeField, t: usize) -> (usize, usize) {
    field.columns_at(t).unwrap_or((1, 0))
}

/// Values `L(source -> (t, j))` for all cells that can also reach the column
/// window `target` at time `t1`.
pub fn forward(field: &LatticeField, source: Cell, t1: usize, target: (usize, usize)) -> Sweep {
    let t0 = source.time();
    let c0 = source.col;
    let windows = (t0..=t1)
        .map(|t| {
            let (flo, fhi) = field_window(field, t);
            let lo = c0.max(flo).max(target.0.saturating_sub(t1 - t));
            let hi = (c0 + (t - t0)).min(fhi).min(target.1);
            (lo, hi)
        })
        .collect();
    let mut s = Sweep::with_windows(t0, t1, windows);
    if s.window(t0).is_some() {
        s.set(t0, c0, field.at(t0, c0));
    }
    for t in t0 + 1..=t1 {
        if let Some((lo, hi)) = s.window(t) {
            for j in lo..=hi {
                let up = s.get(t - 1, j);
                let left = if j > 0 { s.get(t - 1, j - 1) } else { NEG };
                s.set(t, j, mx(up, left) + field.at(t, j));
            }
        }
    }
    s
}

/// Values `L((t, j) -> sink)` for all cells reachable from the column window
/// `origin` at time `t0`.
pub fn backward(field: &LatticeField, sink: Cell, t0: usize, origin: (usize, usize)) -> Sweep {
    let t1 = sink.time();
    let c1 = sink.col;
    let windows = (t0..=t1)
        .map(|t| {
            let (flo, fhi) = field_window(field, t);
            let lo = c1.saturating_sub(t1 - t).max(flo).max(origin.0);
            let hi = c1.min(fhi).min(origin.1 + (t - t0));
            (lo, hi)
        })
        .collect();
    let mut s = Sweep::with_windows(t0, t1, windows);
    if s.window(t1).is_some() {
        s.set(t1, c1, field.at(t1, c1));
    }
    for t in (t0..t1).rev() {
        if let Some((lo, hi)) = s.window(t) {
            for j in lo..=hi {
                let down = s.get(t + 1, j);
                let right = s.get(t + 1, j + 1);
                s.set(t, j, mx(down, right) + field.at(t, j));
            }
        }
    }
    s
}

/// Maximal weight of a down-right path from `a` to `b`, both cells counted.
pub fn passage_value(field: &LatticeField, a: Cell, b: Cell) -> Result<f64, PassageError> {
    check_quad(field, a, b)?;
    Ok(forward(field, a, b.time(), (b.col, b.col)).get(b.time(), b.col))
}

/// Passage values from `source` to every cell of the anti-diagonal `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub t: usize,
    /// Column of `values[0]`.
    pub first_col: usize,
    pub values: Vec<f64>,
}

impl Profile {
    pub fn at_col(&self, j: usize) -> Option<f64> {
        j.checked_sub(self.first_col).and_then(|k| self.values.get(k)).copied()
    }
}

pub fn passage_profile(field: &LatticeField, source: Cell, t: usize) -> Result<Profile, PassageError> {
    check_cell(field, source)?;
    if t < source.time() || t > field.max_time() {
        return Err(PassageError::Outside(format!("time {t}")));
    }
    let target = field_window(field, t);
    let s = forward(field, source, t, target);
    let (lo, hi) = s.window(t).expect("the cone of a cell meets every later anti-diagonal");
    Ok(Profile { t, first_col: lo, values: (lo..=hi).map(|j| s.get(t, j)).collect() })
}

fn cell_chain(field: &LatticeField, cells: &[Cell]) -> Chain {
    let nodes: Vec<_> = cells.iter().map(|c| c.point()).collect();
    let value = cells.iter().map(|&c| field.weight(c)).sum();
    let endpoints = OrderedQuad { start: nodes[0], end: *nodes.last().unwrap() };
    Chain { endpoints, nodes, value }
}

/// Cells of the extremal geodesic to `b` read back from a forward table.
pub fn trace_geodesic(field: &LatticeField, fwd: &Sweep, b: Cell, side: Side) -> Vec<Cell> {
    let mut t = b.time();
    let mut j = b.col;
    let mut cells = vec![b];
    while t > fwd.t0 {
        let up = fwd.get(t - 1, j);
        let left = if j > 0 { fwd.get(t - 1, j - 1) } else { NEG };
        let m = mx(up, left);
        let go_left = match side {
            Side::Left => left == m,
            Side::Right => up != m,
        };
        if go_left {
            j -= 1;
        }
        t -= 1;
        cells.push(Cell::at(t, j).unwrap());
    }
    let _ = field;
    cells.reverse();
    cells
}

/// Leftmost or rightmost geodesic from `a` to `b`.
pub fn geodesic(field: &LatticeField, a: Cell, b: Cell, side: Side) -> Result<Chain, PassageError> {
    check_quad(field, a, b)?;
    let fwd = forward(field, a, b.time(), (b.col, b.col));
    Ok(cell_chain(field, &trace_geodesic(field, &fwd, b, side)))
}

/// Whether `p` lies on some geodesic from `a` to `b`.
pub fn on_optimal(field: &LatticeField, a: Cell, b: Cell, p: Cell) -> Result<bool, PassageError> {
    check_quad(field, a, b)?;
    check_cell(field, p)?;
    if p.row < a.row || p.col < a.col || p.row > b.row || p.col > b.col {
        return Ok(false);
    }
    let total = passage_value(field, a, b)?;
    let via = passage_value(field, a, p)? + passage_value(field, p, b)? - field.weight(p);
    Ok(same_value(via, total, field.is_integer()))
}

/// All geodesics from `a` to `b`, contracted to the source, the sink and branch points.
pub fn network(field: &LatticeField, a: Cell, b: Cell) -> Result<GeodesicNetwork, PassageError> {
    check_quad(field, a, b)?;
    let (t0, t1) = (a.time(), b.time());
    let exact = field.is_integer();
    let fwd = forward(field, a, t1, (b.col, b.col));
    let bwd = backward(field, b, t0, (a.col, a.col));
    let total = fwd.get(t1, b.col);

    let mut index = std::collections::HashMap::new();
    let mut cells = Vec::new();
    for t in t0..=t1 {
        if let Some((lo, hi)) = fwd.window(t) {
            for j in lo..=hi {
                let w = field.at(t, j);
                if same_value(fwd.get(t, j) + bwd.get(t, j) - w, total, exact) {
                    index.insert((t, j), cells.len());
                    cells.push((t, j));
                }
            }
        }
    }
    let succ = cells
        .iter()
        .map(|&(t, j)| {
            [(t + 1, j), (t + 1, j + 1)]
                .into_iter()
                .filter_map(|key| {
                    let k = *index.get(&key)?;
                    same_value(fwd.get(t, j) + bwd.get(key.0, key.1), total, exact).then_some(k)
                })
                .collect()
        })
        .collect();
    let points = cells.iter().map(|&(t, j)| Cell::at(t, j).unwrap().point()).collect();
    let dag = OptimalDag { points, succ };
    let leftmost = cell_chain(field, &trace_geodesic(field, &fwd, b, Side::Left));
    let rightmost = cell_chain(field, &trace_geodesic(field, &fwd, b, Side::Right));
    Ok(dag.into_network(total, leftmost, rightmost))
}

/// A pair of cells on one anti-diagonal, `left.col <= right.col`; equal cells form a doubled point.
pub type CellPair = (Cell, Cell);

fn check_pair(field: &LatticeField, p: CellPair) -> Result<(), PassageError> {
    check_cell(field, p.0)?;
    check_cell(field, p.1)?;
    if p.0.time() != p.1.time() || p.0.col > p.1.col {
        return Err(PassageError::BadPair(format!("{:?} / {:?}", p.0, p.1)));
    }
    Ok(())
}

/// Column windows of a pair sweep. Both windows only grow with time.
#[derive(Debug, Clone, Copy)]
struct PairWindows {
    src: (usize, usize),
    t_start: usize,
    tgt: (usize, usize),
    t_end: usize,
}

impl PairWindows {
    fn at(&self, field: &LatticeField, t: usize) -> (usize, usize) {
        let (flo, fhi) = field_window(field, t);
        let lo = self.src.0.max(flo).max(self.tgt.0.saturating_sub(self.t_end - t));
        let hi = (self.src.1 + (t - self.t_start)).min(fhi).min(self.tgt.1);
        (lo, hi)
    }
}

/// Two-path sweep over ordered pairs of columns `a < b` at a common time.
///
/// The state `(a, b)` holds the best total weight of two paths that are
/// disjoint so far and currently occupy columns `a` and `b`.
pub struct PairSweep<'a> {
    field: &'a LatticeField,
    win: PairWindows,
    off: usize,
    width: usize,
    cur: Vec<f64>,
    nxt: Vec<f64>,
    scratch: Vec<f64>,
    wrow: Vec<f64>,
    t: usize,
    lo: usize,
    hi: usize,
}

impl<'a> PairSweep<'a> {
    fn new(field: &'a LatticeField, win: PairWindows, init: (usize, usize, f64)) -> Self {
        let (lo, hi) = win.at(field, win.t_start);
        let (_, hi_end) = win.at(field, win.t_end);
        let off = lo.min(init.0);
        let width = hi_end.max(hi).max(init.1) + 3 - off;
        let mut s = Self {
            field,
            win,
            off,
            width,
            cur: vec![NEG; width * width],
            nxt: vec![NEG; width * width],
            scratch: vec![NEG; width],
            wrow: vec![NEG; width],
            t: win.t_start,
            lo,
            hi,
        };
        if lo <= init.0 && init.1 <= hi {
            let i = s.idx(init.0, init.1);
            s.cur[i] = init.2;
        }
        s
    }

    /// Two paths leaving the doubled cell `source`, to be read at time `t_end`
    /// in columns `target`.
    pub fn doubled(field: &'a LatticeField, source: Cell, t_end: usize, target: (usize, usize)) -> Option<Self> {
        let (t0, s) = (source.time(), source.col);
        if t_end <= t0 {
            return None;
        }
        let init = 2.0 * field.at(t0, s) + field.at(t0 + 1, s) + field.at(t0 + 1, s + 1);
        let win = PairWindows { src: (s, s + 1), t_start: t0 + 1, tgt: target, t_end };
        Some(Self::new(field, win, (s, s + 1, init)))
    }

    fn distinct(field: &'a LatticeField, start: CellPair, t_end: usize, target: (usize, usize)) -> Self {
        let (t0, a, b) = (start.0.time(), start.0.col, start.1.col);
        let init = field.at(t0, a) + field.at(t0, b);
        let win = PairWindows { src: (a, b), t_start: t0, tgt: target, t_end };
        Self::new(field, win, (a, b, init))
    }

    #[inline]
    fn idx(&self, a: usize, b: usize) -> usize {
        (a + 1 - self.off) * self.width + (b + 1 - self.off)
    }

    pub fn time(&self) -> usize {
        self.t
    }

    pub fn window(&self) -> (usize, usize) {
        (self.lo, self.hi)
    }

    /// Best value with the two paths at columns `a < b` at the current time.
    pub fn value(&self, a: usize, b: usize) -> f64 {
        if a >= b || a < self.lo || b > self.hi {
            return NEG;
        }
        self.cur[self.idx(a, b)]
    }

    /// Advance one anti-diagonal.
    pub fn step(&mut self) {
        let t = self.t + 1;
        let (lo, hi) = self.win.at(self.field, t);
        let w = self.width;
        if lo <= hi {
            for j in lo..=hi {
                let k = j + 1 - self.off;
                self.wrow[k] = self.field.at(t, j);
            }
            for a in lo..hi {
                let wa = self.wrow[a + 1 - self.off];
                let bl = (a + 1).max(lo);
                let ra = (a + 1 - self.off) * w;
                let ra1 = ra - w;
                let c0 = bl - self.off;
                let c1 = hi + 1 - self.off;
                // scratch[c] = max over the two previous rows, for c in c0..=c1
                {
                    let top = &self.cur[ra + c0..=ra + c1];
                    let up = &self.cur[ra1 + c0..=ra1 + c1];
                    for ((m, &x), &y) in self.scratch[c0..=c1].iter_mut().zip(top).zip(up) {
                        *m = mx(x, y);
                    }
                }
                let out = &mut self.nxt[ra + c0 + 1..=ra + c1];
                let prev = &self.scratch[c0..c1];
                let here = &self.scratch[c0 + 1..=c1];
                let ws = &self.wrow[c0 + 1..=c1];
                for (((o, &p), &h), &wb) in out.iter_mut().zip(prev).zip(here).zip(ws) {
                    *o = mx(p, h) + wa + wb;
                }
            }
            // Fence the window with -inf so the next step never reads stale entries.
            let fl = lo + 1 - self.off - 1;
            let fh = hi + 1 - self.off + 1;
            for c in fl..=fh {
                self.nxt[fl * w + c] = NEG;
            }
            for r in fl..=fh - 1 {
                self.nxt[r * w + fl] = NEG;
                self.nxt[r * w + fh] = NEG;
                self.nxt[r * w + r] = NEG;
            }
        } else {
            self.nxt.iter_mut().for_each(|v| *v = NEG);
        }
        std::mem::swap(&mut self.cur, &mut self.nxt);
        self.t = t;
        self.lo = lo;
        self.hi = hi;
    }

    pub fn advance_to(&mut self, t: usize) {
        while self.t < t {
            self.step();
        }
    }

    /// Copy of the current window as a dense `(hi - lo + 1)^2` block, row `a`, column `b`.
    fn snapshot(&self) -> (usize, usize, Vec<f64>) {
        let (lo, hi) = (self.lo, self.hi);
        if lo > hi {
            return (lo, hi, Vec::new());
        }
        let n = hi - lo + 1;
        let mut v = vec![NEG; n * n];
        for a in lo..=hi {
            for b in a + 1..=hi {
                v[(a - lo) * n + (b - lo)] = self.cur[self.idx(a, b)];
            }
        }
        (lo, hi, v)
    }
}

/// How the pair endpoints are read out.
enum Ends {
    Distinct(usize, usize, usize),
    Doubled(usize, usize),
}

fn pair_setup<'a>(
    field: &'a LatticeField,
    start: CellPair,
    end: CellPair,
) -> Result<Option<(PairSweep<'a>, Ends)>, PassageError> {
    check_pair(field, start)?;
    check_pair(field, end)?;
    let (t0, t1) = (start.0.time(), end.0.time());
    if t1 <= t0 {
        return Err(PassageError::BadPair("end pair must come after start pair".into()));
    }
    let doubled_start = start.0 == start.1;
    let ends = if end.0 == end.1 {
        let e = end.0.col;
        if e == 0 {
            return Ok(None);
        }
        Ends::Doubled(t1, e)
    } else {
        Ends::Distinct(t1, end.0.col, end.1.col)
    };
    let (t_read, target) = match ends {
        Ends::Doubled(t, e) => (t - 1, (e - 1, e)),
        Ends::Distinct(t, a, b) => (t, (a, b)),
    };
    let sweep = if doubled_start {
        if t_read < t0 + 1 {
            return Ok(None);
        }
        PairSweep::doubled(field, start.0, t_read, target).expect("t_read > t0")
    } else {
        PairSweep::distinct(field, start, t_read, target)
    };
    Ok(Some((sweep, ends)))
}

fn read_end(field: &LatticeField, sweep: &PairSweep, ends: &Ends) -> f64 {
    match *ends {
        Ends::Doubled(t, e) => sweep.value(e - 1, e) + 2.0 * field.at(t, e),
        Ends::Distinct(_, a, b) => sweep.value(a, b),
    }
}

/// Best total weight of two ordered paths from `start` to `end` that share no cell
/// apart from doubled endpoints. Doubled endpoints are counted once per path.
/// `None` when no such pair exists.
pub fn disjoint2_value(field: &LatticeField, start: CellPair, end: CellPair) -> Result<Option<f64>, PassageError> {
    let Some((mut sweep, ends)) = pair_setup(field, start, end)? else {
        return Ok(None);
    };
    let t_read = match ends {
        Ends::Doubled(t, _) => t - 1,
        Ends::Distinct(t, _, _) => t,
    };
    sweep.advance_to(t_read);
    let v = read_end(field, &sweep, &ends);
    Ok(v.is_finite().then_some(v))
}

/// The leftmost or rightmost optimal disjoint pair.
pub fn optimizer2(
    field: &LatticeField,
    start: CellPair,
    end: CellPair,
    side: Side,
) -> Result<Option<DisjointPair>, PassageError> {
    let Some((mut sweep, ends)) = pair_setup(field, start, end)? else {
        return Ok(None);
    };
    let t_read = match ends {
        Ends::Doubled(t, _) => t - 1,
        Ends::Distinct(t, _, _) => t,
    };
    let t_start = sweep.time();
    let mut layers = vec![sweep.snapshot()];
    while sweep.time() < t_read {
        sweep.step();
        layers.push(sweep.snapshot());
    }
    let value = read_end(field, &sweep, &ends);
    if !value.is_finite() {
        return Ok(None);
    }
    let get = |k: usize, a: usize, b: usize| -> f64 {
        let (lo, hi, ref v) = layers[k];
        if a >= b || a < lo || b > hi {
            NEG
        } else {
            v[(a - lo) * (hi - lo + 1) + (b - lo)]
        }
    };
    let (mut a, mut b) = match ends {
        Ends::Doubled(_, e) => (e - 1, e),
        Ends::Distinct(_, x, y) => (x, y),
    };
    let mut states = vec![(a, b)];
    for k in (1..layers.len()).rev() {
        let cands = [(a.wrapping_sub(1), b.wrapping_sub(1)), (a.wrapping_sub(1), b), (a, b.wrapping_sub(1)), (a, b)];
        let vals = cands.map(|(x, y)| if x == usize::MAX || y == usize::MAX { NEG } else { get(k - 1, x, y) });
        let m = vals.iter().copied().fold(NEG, mx);
        let pick = match side {
            Side::Left => (0..4).find(|&i| vals[i] == m),
            Side::Right => (0..4).rev().find(|&i| vals[i] == m),
        }
        .expect("an optimal predecessor exists");
        (a, b) = cands[pick];
        states.push((a, b));
    }
    states.reverse();

    let mut left = Vec::new();
    let mut right = Vec::new();
    if start.0 == start.1 {
        left.push(start.0);
        right.push(start.0);
    }
    for (k, &(x, y)) in states.iter().enumerate() {
        let t = t_start + k;
        left.push(Cell::at(t, x).unwrap());
        right.push(Cell::at(t, y).unwrap());
    }
    if let Ends::Doubled(_, _) = ends {
        left.push(end.0);
        right.push(end.0);
    }
    let left = cell_chain(field, &left);
    let right = cell_chain(field, &right);
    Ok(Some(DisjointPair { value: left.value + right.value, left, right }))
}

/// `2 L - L_2` for the doubled endpoints, `None` when no disjoint pair exists.
pub fn gap(field: &LatticeField, a: Cell, b: Cell) -> Result<Option<f64>, PassageError> {
    let l = passage_value(field, a, b)?;
    Ok(disjoint2_value(field, (a, a), (b, b))?.map(|l2| 2.0 * l - l2))
}
