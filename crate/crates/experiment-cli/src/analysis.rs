use gap_lab::{box_dimension, linear_fit, residual_row, zero_set, BrownianityReport, DimensionEstimate, GapSheet, LatticeGrid};
use model_core::{Cell, LatticeField};

use crate::CliError;

const MAX_LAG: usize = 10;

/// Box dimension of the rescaled zero set, with dyadic scales from the domain
/// width down to the grid mesh. `None` without zeros.
pub fn zero_set_dimension(sheet: &GapSheet) -> Option<DimensionEstimate> {
    let z = zero_set(sheet);
    if z.is_empty() {
        return None;
    }
    let span = |v: &[f64]| v.last().copied().unwrap_or(0.0) - v.first().copied().unwrap_or(0.0);
    let width = span(&sheet.xs).max(span(&sheet.ys));
    let mesh = sheet.xs.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let mut scales = Vec::new();
    let mut s = width;
    while s >= mesh && s > 0.0 {
        scales.push(s);
        s /= 2.0;
    }
    Some(box_dimension(&z.points(), &scales))
}

/// Variance-versus-lag regression of rescaled increments of the slices
/// `y -> G(x, y)`, pooling every fully defined row of the sheet.
pub fn pooled_brownianity(sheet: &GapSheet) -> BrownianityReport {
    let (nx, ny) = sheet.shape();
    let max_lag = MAX_LAG.min(ny.saturating_sub(1));
    let mut sums = vec![(0.0f64, 0.0f64, 0usize); max_lag];
    for i in 0..nx {
        let row = sheet.row(i);
        if row.iter().any(Option::is_none) {
            continue;
        }
        let v: Vec<f64> = row.iter().map(|g| sheet.frame.fluctuation(g.unwrap())).collect();
        for k in 1..=max_lag {
            for w in v.windows(k + 1) {
                let d = w[k] - w[0];
                let s = &mut sums[k - 1];
                s.0 += d;
                s.1 += d * d;
                s.2 += 1;
            }
        }
    }
    let mesh = sheet.ys.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let mut lags = Vec::new();
    let mut variances = Vec::new();
    for (k, &(s, ss, n)) in sums.iter().enumerate() {
        if n > 1 {
            let mean = s / n as f64;
            lags.push((k + 1) as f64 * mesh);
            variances.push(ss / n as f64 - mean * mean);
        }
    }
    let degenerate = variances.iter().all(|&v| v <= 0.0);
    let (intercept, slope, r2) = if degenerate || lags.len() < 2 { (0.0, 0.0, 0.0) } else { linear_fit(&lags, &variances) };
    BrownianityReport { lags, variances, slope, intercept, r2, degenerate }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MinFormulaStats {
    pub n: usize,
    /// Pairs `y <= z` with a defined residual.
    pub pairs: usize,
    pub nonzero: usize,
    /// Mean of `|residual| / n^{1/3}`.
    pub mean_abs: f64,
}

/// Min-formula residuals from the middle start of a `centered(n / 2, n)` grid
/// to every pair of ends within one rescaled unit of the straight line.
pub fn min_formula_mean(field: &LatticeField, n: usize) -> Result<MinFormulaStats, CliError> {
    let grid = LatticeGrid::centered(n / 2, n);
    let k = n / 4;
    let x: Cell = grid.source(k);
    let centre = grid.sink(k).col;
    let half = (grid.frame().space_scale() / 2.0).round() as usize;
    let (lo, hi) = (centre.saturating_sub(half).max(1), centre + half);
    let row = residual_row(field, x, grid.t1(), lo, hi).map_err(|e| CliError::engine(format!("min formula at n = {n}"), e))?;
    let mut pairs = 0;
    let mut nonzero = 0;
    let mut total = 0.0;
    for a in lo..=hi {
        for b in a..=hi {
            if let Some(r) = row.residual(a, b) {
                pairs += 1;
                nonzero += usize::from(r != 0.0);
                total += r.abs();
            }
        }
    }
    let mean_abs = if pairs == 0 { 0.0 } else { total / pairs as f64 / (n as f64).cbrt() };
    Ok(MinFormulaStats { n, pairs, nonzero, mean_abs })
}
