use std::collections::HashSet;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub dimension: f64,
    pub intercept: f64,
    pub r2: f64,
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
    pub warning: Option<String>,
}

/// Least-squares fit `y = a + b x`, returning `(a, b, r2)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx == 0.0 {
        return (my, 0.0, 0.0);
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (a, b, r2)
}

/// Box-counting dimension: slope of `ln N(s)` against `ln(1/s)`.
///
/// Boxes are anchored at the componentwise minimum of the points.
pub fn box_dimension<const D: usize>(points: &[[f64; D]], scales: &[f64]) -> DimensionEstimate {
    let mut origin = [f64::INFINITY; D];
    for p in points {
        for k in 0..D {
            origin[k] = origin[k].min(p[k]);
        }
    }
    let counts: Vec<usize> = scales
        .iter()
        .map(|&s| {
            let boxes: HashSet<[i64; D]> = points
                .iter()
                .map(|p| std::array::from_fn(|k| ((p[k] - origin[k]) / s).floor() as i64))
                .collect();
            boxes.len()
        })
        .collect();
    let mut warning = None;
    if points.is_empty() {
        warning = Some("empty point set".to_string());
    } else if counts.iter().all(|&c| c <= 1) {
        warning = Some("all points fall in one box at every scale".to_string());
    }
    if warning.is_some() || scales.len() < 2 {
        return DimensionEstimate {
            dimension: 0.0,
            intercept: 0.0,
            r2: 0.0,
            scales: scales.to_vec(),
            counts,
            warning: warning.or(Some("fewer than two scales".into())),
        };
    }
    let x: Vec<f64> = scales.iter().map(|s| (1.0 / s).ln()).collect();
    let y: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let (a, b, r2) = linear_fit(&x, &y);
    DimensionEstimate { dimension: b, intercept: a, r2, scales: scales.to_vec(), counts, warning }
}

/// `base * 2^{-k}` for `k = 0..count`.
pub fn dyadic_scales(base: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| base / (1u64 << k) as f64).collect()
}
