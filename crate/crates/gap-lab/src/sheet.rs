use model_core::{Cell, LatticeField, OrderedQuad, PoissonCloud, ScalingFrame, SpaceTimePoint};
use passage_engine::lattice::{passage_profile, PairSweep};
use passage_engine::{lattice, poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::GapError;

/// Gap values on a product grid of start positions `xs` and end positions `ys`.
///
/// Positions are in rescaled units; `values` is row-major with one row per start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSheet {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Raw gaps; `None` where no disjoint pair exists.
    pub values: Vec<Option<f64>>,
    pub frame: ScalingFrame,
    /// Integer-valued model, so zero tests are exact.
    pub exact: bool,
}

impl GapSheet {
    pub fn shape(&self) -> (usize, usize) {
        (self.xs.len(), self.ys.len())
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[i * self.ys.len() + j]
    }

    /// The slice `y -> G(x_i, y)`.
    pub fn row(&self, i: usize) -> Vec<Option<f64>> {
        self.values[i * self.ys.len()..(i + 1) * self.ys.len()].to_vec()
    }

    /// The slice `x -> G(x, y_j)`.
    pub fn col(&self, j: usize) -> Vec<Option<f64>> {
        (0..self.xs.len()).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self, i: usize, j: usize) -> bool {
        match self.get(i, j) {
            Some(v) if self.exact => v == 0.0,
            Some(v) => v.abs() <= 1e-9,
            None => false,
        }
    }

    pub fn rescaled(&self, i: usize, j: usize) -> Option<f64> {
        self.get(i, j).map(|v| self.frame.fluctuation(v))
    }
}

/// Starts on one anti-diagonal and ends `horizon` steps later.
///
/// Start `k` is the cell at time `t0` in column `src_cols[k]`; end `k` is at
/// time `t0 + horizon` in column `dst_cols[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeGrid {
    pub t0: usize,
    pub horizon: usize,
    pub src_cols: Vec<usize>,
    pub dst_cols: Vec<usize>,
}

impl LatticeGrid {
    /// `width` starts on consecutive columns facing `width` ends shifted by half the horizon,
    /// so start `k` and end `k` sit at equal natural position.
    pub fn centered(width: usize, horizon: usize) -> Self {
        let shift = horizon / 2;
        Self {
            t0: width - 1,
            horizon,
            src_cols: (0..width).collect(),
            dst_cols: (0..width).map(|k| k + shift).collect(),
        }
    }

    pub fn t1(&self) -> usize {
        self.t0 + self.horizon
    }

    /// Side of the smallest square field holding every start and end.
    pub fn field_side(&self) -> usize {
        let rows = self.src_cols.iter().map(|&j| self.t0 - j).chain(self.dst_cols.iter().map(|&j| self.t1() - j));
        let cols = self.src_cols.iter().chain(&self.dst_cols).copied();
        rows.chain(cols).max().unwrap_or(0) + 1
    }

    pub fn source(&self, k: usize) -> Cell {
        Cell::at(self.t0, self.src_cols[k]).expect("column inside the anti-diagonal")
    }

    pub fn sink(&self, k: usize) -> Cell {
        Cell::at(self.t1(), self.dst_cols[k]).expect("column inside the anti-diagonal")
    }

    pub fn frame(&self) -> ScalingFrame {
        ScalingFrame::new(self.horizon as f64).expect("positive horizon")
    }

    fn check(&self, field: &LatticeField) -> Result<(), GapError> {
        if self.horizon < 2 {
            return Err(GapError::Grid("horizon must be at least 2".into()));
        }
        for k in 0..self.src_cols.len() {
            if self.src_cols[k] > self.t0 || !field.contains(self.source(k)) {
                return Err(GapError::Grid(format!("start column {} outside the field", self.src_cols[k])));
            }
        }
        for k in 0..self.dst_cols.len() {
            if self.dst_cols[k] > self.t1() || !field.contains(self.sink(k)) {
                return Err(GapError::Grid(format!("end column {} outside the field", self.dst_cols[k])));
            }
        }
        Ok(())
    }
}

/// `2 L - L_2` between doubled cells.
pub fn gap_value_lattice(field: &LatticeField, a: Cell, b: Cell) -> Result<Option<f64>, GapError> {
    Ok(lattice::gap(field, a, b)?)
}

/// `2 L - L_2` between doubled anchors of a cloud.
pub fn gap_value_poisson(cloud: &PoissonCloud, quad: &OrderedQuad) -> Result<Option<f64>, GapError> {
    Ok(Some(poisson::gap(cloud, quad)?))
}

/// One row of the sheet: one forward sweep for `L` and one pair sweep for `L_2`.
pub(crate) fn lattice_row(field: &LatticeField, source: Cell, t1: usize, cols: &[usize]) -> Vec<Option<f64>> {
    let mut out = vec![None; cols.len()];
    let profile = passage_profile(field, source, t1).expect("grid checked");
    let lo = cols.iter().copied().min().unwrap_or(0).max(1);
    let hi = cols.iter().copied().max().unwrap_or(0);
    if hi < lo {
        return out;
    }
    let Some(mut sweep) = PairSweep::doubled(field, source, t1 - 1, (lo - 1, hi)) else {
        return out;
    };
    sweep.advance_to(t1 - 1);
    for (o, &e) in out.iter_mut().zip(cols) {
        let Some(l) = profile.at_col(e).filter(|l| l.is_finite()) else {
            continue;
        };
        if e == 0 {
            continue;
        }
        let l2 = sweep.value(e - 1, e) + 2.0 * field.at(t1, e);
        if l2.is_finite() {
            *o = Some(2.0 * l - l2);
        }
    }
    out
}

/// The sheet over a lattice grid, rows computed in parallel.
pub fn gap_sheet_lattice(field: &LatticeField, grid: &LatticeGrid) -> Result<GapSheet, GapError> {
    grid.check(field)?;
    let frame = grid.frame();
    let rows: Vec<Vec<Option<f64>>> = (0..grid.src_cols.len())
        .into_par_iter()
        .map(|k| lattice_row(field, grid.source(k), grid.t1(), &grid.dst_cols))
        .collect();
    let xs = (0..grid.src_cols.len()).map(|k| frame.space(grid.source(k).point().x)).collect();
    let ys = (0..grid.dst_cols.len()).map(|k| frame.space(grid.sink(k).point().x)).collect();
    Ok(GapSheet { xs, ys, values: rows.concat(), frame, exact: field.is_integer() })
}

/// The sheet between anchors `(x n^{2/3}, 0)` and `(y n^{2/3}, n)` for rescaled `xs`, `ys`.
pub fn gap_sheet_poisson(cloud: &PoissonCloud, frame: ScalingFrame, xs: &[f64], ys: &[f64]) -> Result<GapSheet, GapError> {
    let rows: Result<Vec<Vec<Option<f64>>>, GapError> = xs
        .par_iter()
        .map(|&x| {
            ys.iter()
                .map(|&y| {
                    let a = frame.raw_point(&SpaceTimePoint::new(x, 0.0));
                    let b = frame.raw_point(&SpaceTimePoint::new(y, 1.0));
                    if !model_core::causal_leq(&a, &b) {
                        return Ok(None);
                    }
                    gap_value_poisson(cloud, &OrderedQuad { start: a, end: b })
                })
                .collect()
        })
        .collect();
    Ok(GapSheet { xs: xs.to_vec(), ys: ys.to_vec(), values: rows?.concat(), frame, exact: true })
}
