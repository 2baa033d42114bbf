use serde::{Deserialize, Serialize};

use crate::{GapError, GapSheet};

/// Grid cells `(i, j)` where the sheet vanishes, with the rescaled grid positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Sorted by `(i, j)`.
    pub cells: Vec<(usize, usize)>,
}

impl ZeroSet {
    pub fn contains(&self, cell: (usize, usize)) -> bool {
        self.cells.binary_search(&cell).is_ok()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Rescaled positions of the zeros.
    pub fn points(&self) -> Vec<[f64; 2]> {
        self.cells.iter().map(|&(i, j)| [self.xs[i], self.ys[j]]).collect()
    }
}

pub fn zero_set(sheet: &GapSheet) -> ZeroSet {
    let (nx, ny) = sheet.shape();
    let cells = (0..nx).flat_map(|i| (0..ny).map(move |j| (i, j))).filter(|&(i, j)| sheet.is_zero(i, j)).collect();
    ZeroSet { xs: sheet.xs.clone(), ys: sheet.ys.clone(), cells }
}

/// Open quadrants around an anchor `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quadrant {
    /// `x' < x` and `y' > y`.
    MinusPlus,
    /// `x' > x` and `y' < y`.
    PlusMinus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsolationReport {
    /// `(radius, isolated within that radius)` for each radius of the schedule.
    pub per_radius: Vec<(f64, bool)>,
    /// The verdict at the smallest radius.
    pub isolated: bool,
}

/// Whether `anchor` has no other zero in the open quadrant within each radius.
///
/// Distances are measured in the max norm of rescaled coordinates.
pub fn quadrant_isolated(
    z: &ZeroSet,
    anchor: (usize, usize),
    quadrant: Quadrant,
    radii: &[f64],
) -> Result<IsolationReport, GapError> {
    if !z.contains(anchor) {
        return Err(GapError::NotAZero(format!("{anchor:?}")));
    }
    if radii.is_empty() {
        return Err(GapError::Grid("empty radius schedule".into()));
    }
    let (x, y) = (z.xs[anchor.0], z.ys[anchor.1]);
    // Distance to the nearest zero in the quadrant.
    let nearest = z
        .cells
        .iter()
        .filter(|&&(i, j)| match quadrant {
            Quadrant::MinusPlus => i < anchor.0 && j > anchor.1,
            Quadrant::PlusMinus => i > anchor.0 && j < anchor.1,
        })
        .map(|&(i, j)| (z.xs[i] - x).abs().max((z.ys[j] - y).abs()))
        .fold(f64::INFINITY, f64::min);
    let mut per_radius: Vec<(f64, bool)> = radii.iter().map(|&r| (r, nearest > r)).collect();
    per_radius.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(IsolationReport { isolated: per_radius[0].1, per_radius })
}

/// Fraction of zeros having another zero strictly above and to the right,
/// or strictly below and to the left, within max-norm distance `eps`.
pub fn bow_tie_frequency(z: &ZeroSet, eps: f64) -> f64 {
    if z.is_empty() {
        return 0.0;
    }
    let hits = z
        .cells
        .iter()
        .filter(|&&(i, j)| {
            z.cells.iter().any(|&(k, l)| {
                let ordered = (k > i && l > j) || (k < i && l < j);
                ordered && (z.xs[k] - z.xs[i]).abs().max((z.ys[l] - z.ys[j]).abs()) <= eps
            })
        })
        .count();
    hits as f64 / z.len() as f64
}
