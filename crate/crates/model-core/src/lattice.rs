use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::point::SpaceTimePoint;
use crate::rng::Stream;

/// Weight distribution of a lattice field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Law {
    /// Failures before the first success, mean `(1 - p) / p`.
    Geometric { p: f64 },
    /// Mean one.
    Exponential,
    Bernoulli { p: f64 },
    Explicit { weights: Vec<Vec<f64>> },
}

impl Law {
    pub fn is_integer(&self) -> bool {
        match self {
            Law::Geometric { .. } | Law::Bernoulli { .. } => true,
            Law::Exponential => false,
            Law::Explicit { weights } => weights.iter().flatten().all(|w| w.fract() == 0.0),
        }
    }
}

/// A cell of the lattice, zero based. Paths move down (`row + 1`) or right (`col + 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    /// Anti-diagonal index, the time coordinate of the cell.
    pub fn time(&self) -> usize {
        self.row + self.col
    }

    /// Cell at time `t` in column `j`, if `j <= t`.
    pub fn at(t: usize, j: usize) -> Option<Self> {
        (j <= t).then(|| Self { row: t - j, col: j })
    }

    /// Space-time position `(col - row, row + col)`.
    pub fn point(&self) -> SpaceTimePoint {
        SpaceTimePoint::new(self.col as f64 - self.row as f64, (self.row + self.col) as f64)
    }

    /// Inverse of [`Cell::point`] for points with integer coordinates of equal parity.
    pub fn from_point(p: &SpaceTimePoint) -> Option<Self> {
        let t = p.t.round();
        let x = p.x.round();
        if t != p.t || x != p.x || t < 0.0 {
            return None;
        }
        let col2 = t + x;
        let row2 = t - x;
        if col2 < 0.0 || row2 < 0.0 || col2 % 2.0 != 0.0 {
            return None;
        }
        Some(Self { row: (row2 / 2.0) as usize, col: (col2 / 2.0) as usize })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeField {
    pub seed: u64,
    pub rows: usize,
    pub cols: usize,
    pub law: Law,
    /// Row-major.
    pub weights: Vec<f64>,
    #[serde(default)]
    pub reflected: bool,
}

/// Stream ids for lattice rows start here so they never collide with the cloud streams.
const ROW_STREAM_BASE: u64 = 1 << 32;

pub fn make_lattice_field(seed: u64, rows: usize, cols: usize, law: Law) -> Result<LatticeField, ModelError> {
    if rows == 0 || cols == 0 {
        return Err(ModelError::Parameter { name: "shape", detail: format!("{rows}x{cols} has no cells") });
    }
    let check_p = |p: f64| {
        if p > 0.0 && p < 1.0 {
            Ok(())
        } else {
            Err(ModelError::Parameter { name: "p", detail: format!("{p} is outside (0, 1)") })
        }
    };
    let weights = match &law {
        Law::Explicit { weights } => {
            if weights.len() != rows || weights.iter().any(|r| r.len() != cols) {
                return Err(ModelError::Ragged);
            }
            if weights.iter().flatten().any(|w| !w.is_finite() || *w < 0.0) {
                return Err(ModelError::Parameter { name: "weights", detail: "entries must be finite and nonnegative".into() });
            }
            weights.iter().flatten().copied().collect()
        }
        Law::Geometric { p } => {
            check_p(*p)?;
            let log_q = (1.0 - p).ln();
            draw(seed, rows, cols, |s| (s.next_open_f64().ln() / log_q).floor())
        }
        Law::Bernoulli { p } => {
            check_p(*p)?;
            draw(seed, rows, cols, |s| if s.next_f64() < *p { 1.0 } else { 0.0 })
        }
        Law::Exponential => draw(seed, rows, cols, |s| -s.next_open_f64().ln()),
    };
    Ok(LatticeField { seed, rows, cols, law, weights, reflected: false })
}

fn draw(seed: u64, rows: usize, cols: usize, mut f: impl FnMut(&mut Stream) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let mut s = Stream::new(seed, ROW_STREAM_BASE + r as u64, 0);
        for _ in 0..cols {
            out.push(f(&mut s));
        }
    }
    out
}

impl LatticeField {
    pub fn explicit(weights: Vec<Vec<f64>>) -> Result<Self, ModelError> {
        let rows = weights.len();
        let cols = weights.first().map_or(0, |r| r.len());
        make_lattice_field(0, rows, cols, Law::Explicit { weights })
    }

    pub fn constant(rows: usize, cols: usize, value: f64) -> Self {
        Self::explicit(vec![vec![value; cols]; rows]).expect("constant field")
    }

    pub fn weight(&self, c: Cell) -> f64 {
        self.weights[c.row * self.cols + c.col]
    }

    pub fn contains(&self, c: Cell) -> bool {
        c.row < self.rows && c.col < self.cols
    }

    /// Weight at time `t`, column `j`; `-inf` off the grid.
    #[inline]
    pub fn at(&self, t: usize, j: usize) -> f64 {
        if j >= self.cols || j > t || t - j >= self.rows {
            f64::NEG_INFINITY
        } else {
            self.weights[(t - j) * self.cols + j]
        }
    }

    /// Columns present at time `t`, as an inclusive range, or `None` past the last anti-diagonal.
    pub fn columns_at(&self, t: usize) -> Option<(usize, usize)> {
        if t > self.max_time() {
            return None;
        }
        Some((t.saturating_sub(self.rows - 1), t.min(self.cols - 1)))
    }

    pub fn max_time(&self) -> usize {
        self.rows + self.cols - 2
    }

    pub fn is_integer(&self) -> bool {
        self.law.is_integer()
    }

    /// Rotate by half a turn, which is `(x, t) -> (-x, -t)` up to translation.
    pub fn reflect(&self) -> Self {
        let mut weights = self.weights.clone();
        weights.reverse();
        let law = match &self.law {
            Law::Explicit { weights: m } => Law::Explicit {
                weights: m.iter().rev().map(|r| r.iter().rev().copied().collect()).collect(),
            },
            other => other.clone(),
        };
        Self { seed: self.seed, rows: self.rows, cols: self.cols, law, weights, reflected: !self.reflected }
    }

    /// Where `c` lands under [`LatticeField::reflect`].
    pub fn reflect_cell(&self, c: Cell) -> Cell {
        Cell { row: self.rows - 1 - c.row, col: self.cols - 1 - c.col }
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.weights.chunks(self.cols).map(|r| r.to_vec()).collect()
    }
}
