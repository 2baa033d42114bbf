use model_core::{Cell, LatticeField};
use passage_engine::lattice::{disjoint2_value, passage_profile, passage_value, PairSweep};

use crate::sheet::gap_value_lattice;
use crate::GapError;

/// `L_2(x^2; (y, z)) - [L(x; y) + L(x; z) - min_{y <= w <= z} G(x, w)]` on a lattice.
///
/// `y` and `z` lie on one anti-diagonal with `y.col <= z.col`. `None` when a
/// disjoint pair is missing for some term.
pub fn min_formula_residual(field: &LatticeField, x: Cell, y: Cell, z: Cell) -> Result<Option<f64>, GapError> {
    if y.time() != z.time() || y.col > z.col {
        return Err(GapError::Grid(format!("{y:?} and {z:?} are not an ordered pair")));
    }
    let Some(l2) = disjoint2_value(field, (x, x), (y, z))? else {
        return Ok(None);
    };
    let mut min_g = f64::INFINITY;
    for col in y.col..=z.col {
        let w = Cell::at(y.time(), col).expect("between y and z");
        match gap_value_lattice(field, x, w)? {
            Some(g) => min_g = min_g.min(g),
            None => return Ok(None),
        }
    }
    Ok(Some(l2 - (passage_value(field, x, y)? + passage_value(field, x, z)? - min_g)))
}

/// Every residual from one start to pairs of ends in a column range, from one pair sweep.
#[derive(Debug, Clone)]
pub struct ResidualRow {
    pub t1: usize,
    pub lo: usize,
    pub hi: usize,
    pub passage: Vec<f64>,
    pub gaps: Vec<Option<f64>>,
    /// `L_2` to distinct ends `(a, b)`, dense over `lo..=hi` squared.
    pairs: Vec<f64>,
}

impl ResidualRow {
    fn k(&self, col: usize) -> usize {
        col - self.lo
    }

    pub fn pair_value(&self, a: usize, b: usize) -> Option<f64> {
        let n = self.hi - self.lo + 1;
        let v = self.pairs[self.k(a) * n + self.k(b)];
        v.is_finite().then_some(v)
    }

    /// Residual for end columns `a <= b`.
    pub fn residual(&self, a: usize, b: usize) -> Option<f64> {
        let mut min_g = f64::INFINITY;
        for c in a..=b {
            min_g = min_g.min(self.gaps[self.k(c)]?);
        }
        let l2 = if a == b {
            2.0 * self.passage[self.k(a)] - self.gaps[self.k(a)]?
        } else {
            self.pair_value(a, b)?
        };
        Some(l2 - (self.passage[self.k(a)] + self.passage[self.k(b)] - min_g))
    }
}

pub fn residual_row(field: &LatticeField, x: Cell, t1: usize, lo: usize, hi: usize) -> Result<ResidualRow, GapError> {
    if lo == 0 || hi < lo || t1 < x.time() + 2 {
        return Err(GapError::Grid(format!("columns {lo}..={hi} at time {t1}")));
    }
    let profile = passage_profile(field, x, t1)?;
    let passage: Vec<f64> = (lo..=hi).map(|c| profile.at_col(c).unwrap_or(f64::NEG_INFINITY)).collect();
    let mut sweep = PairSweep::doubled(field, x, t1, (lo, hi)).expect("t1 after the start");
    sweep.advance_to(t1 - 1);
    let gaps = (lo..=hi)
        .zip(&passage)
        .map(|(e, &l)| {
            let l2 = sweep.value(e - 1, e) + 2.0 * field.at(t1, e);
            (l.is_finite() && l2.is_finite()).then(|| 2.0 * l - l2)
        })
        .collect();
    sweep.step();
    let n = hi - lo + 1;
    let mut pairs = vec![f64::NEG_INFINITY; n * n];
    for a in lo..=hi {
        for b in a + 1..=hi {
            pairs[(a - lo) * n + (b - lo)] = sweep.value(a, b);
        }
    }
    Ok(ResidualRow { t1, lo, hi, passage, gaps, pairs })
}
