use serde::{Deserialize, Serialize};

use crate::dimension::linear_fit;
use model_core::ScalingFrame;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrownianityReport {
    /// Lags in rescaled space units.
    pub lags: Vec<f64>,
    /// Variance of rescaled increments at each lag, around their mean.
    pub variances: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Set when every variance vanishes.
    pub degenerate: bool,
}

/// Variance of increments at lags `1..=max_lag` grid steps.
pub fn increment_variances(values: &[f64], max_lag: usize) -> Vec<f64> {
    (1..=max_lag)
        .map(|k| {
            let inc: Vec<f64> = values.windows(k + 1).map(|w| w[k] - w[0]).collect();
            let n = inc.len() as f64;
            let mean = inc.iter().sum::<f64>() / n;
            inc.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n
        })
        .collect()
}

/// Variance-versus-lag regression over one decade of lags.
///
/// `spacing` is the raw distance between consecutive slice entries; values
/// are raw gaps. Both are rescaled with `frame` before fitting.
pub fn brownianity(slice: &[f64], spacing: f64, frame: ScalingFrame) -> BrownianityReport {
    let max_lag = 10.min(slice.len().saturating_sub(1));
    let scaled: Vec<f64> = slice.iter().map(|&v| frame.fluctuation(v)).collect();
    let variances = increment_variances(&scaled, max_lag);
    let lags: Vec<f64> = (1..=max_lag).map(|k| frame.space(k as f64 * spacing)).collect();
    let degenerate = variances.iter().all(|&v| v == 0.0);
    let (intercept, slope, r2) = if degenerate || lags.len() < 2 { (0.0, 0.0, 0.0) } else { linear_fit(&lags, &variances) };
    BrownianityReport { lags, variances, slope, intercept, r2, degenerate }
}
