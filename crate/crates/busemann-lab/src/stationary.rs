use gap_lab::{box_dimension, linear_fit, DimensionEstimate};
use model_core::ScalingFrame;
use network_classifier::Model;
use passage_engine::Side;
use serde::{Deserialize, Serialize};

use crate::busemann::{busemann_profile, BusemannProfile};
use crate::geometry::Horizons;
use crate::semigap::BusemannGapProfile;
use crate::BusemannError;

const MAX_LAG: usize = 10;

/// Variance of increments at lags `1..=MAX_LAG` grid steps, skipping pairs
/// whose span contains an excluded index. Returns `(lags, variances)` for lags
/// with at least two increments.
fn lag_variances(values: &[Option<f64>], spacing: f64) -> (Vec<f64>, Vec<f64>) {
    let mut lags = Vec::new();
    let mut vars = Vec::new();
    for k in 1..=MAX_LAG.min(values.len().saturating_sub(1)) {
        let inc: Vec<f64> = values
            .windows(k + 1)
            .filter(|w| w.iter().all(Option::is_some))
            .map(|w| w[k].unwrap() - w[0].unwrap())
            .collect();
        if inc.len() < 2 {
            continue;
        }
        let n = inc.len() as f64;
        let mean = inc.iter().sum::<f64>() / n;
        lags.push(k as f64 * spacing);
        vars.push(inc.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n);
    }
    (lags, vars)
}

fn grid_spacing(xs: &[f64]) -> f64 {
    xs.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionStats {
    pub theta: f64,
    pub certified_fraction: f64,
    /// Mean certified increment per unit of raw space.
    pub drift: Option<f64>,
    /// Rescaled lags and increment variances of certified values.
    pub lags: Vec<f64>,
    pub variances: Vec<f64>,
    pub slope: f64,
    pub r2: f64,
    /// Fraction of the grid where the first-horizon value does not move from `θ` to `θ + δ`.
    pub local_constancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrangleViolation {
    pub theta1: f64,
    pub theta2: f64,
    pub x1: f64,
    pub x2: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryReport {
    pub side: Side,
    pub horizons: Horizons,
    pub delta: f64,
    pub directions: Vec<DirectionStats>,
    pub quadrangle_checked: usize,
    pub quadrangle_violations: Vec<QuadrangleViolation>,
    pub profiles: Vec<BusemannProfile>,
}

impl StationaryReport {
    pub fn violation_rate(&self) -> f64 {
        if self.quadrangle_checked == 0 {
            return 0.0;
        }
        self.quadrangle_violations.len() as f64 / self.quadrangle_checked as f64
    }
}

fn direction_stats(p: &BusemannProfile, shifted: &BusemannProfile, frame: ScalingFrame) -> DirectionStats {
    let xs: Vec<f64> = p.points.iter().map(|q| q.x).collect();
    let cert: Vec<Option<f64>> = p.points.iter().map(|q| q.certified_value()).collect();
    let mut slopes = Vec::new();
    for (w, x) in cert.windows(2).zip(xs.windows(2)) {
        if let [Some(a), Some(b)] = w {
            slopes.push((b - a) / (x[1] - x[0]));
        }
    }
    let drift = (!slopes.is_empty()).then(|| slopes.iter().sum::<f64>() / slopes.len() as f64);
    let scaled: Vec<Option<f64>> = cert.iter().map(|v| v.map(|v| frame.fluctuation(v))).collect();
    let (lags, variances) = lag_variances(&scaled, frame.space(grid_spacing(&xs)));
    let (slope, r2) = if lags.len() >= 2 {
        let (_, b, r2) = linear_fit(&lags, &variances);
        (b, r2)
    } else {
        (0.0, 0.0)
    };
    let same = p.points.iter().zip(&shifted.points).filter(|(a, b)| a.values[0] == b.values[0]).count();
    let local_constancy = if p.points.is_empty() { 1.0 } else { same as f64 / p.points.len() as f64 };
    DirectionStats { theta: p.theta, certified_fraction: p.certified_fraction(), drift, lags, variances, slope, r2, local_constancy }
}

/// Marginal checks of the stationary horizon on finite-horizon Busemann profiles.
///
/// Quadrangle pairs use every `θ1 < θ2` of `thetas` and every `x1 < x2` of the
/// grid certified in both profiles.
pub fn stationary_horizon_tests(
    model: Model<'_>,
    thetas: &[f64],
    side: Side,
    xs: &[f64],
    hz: &Horizons,
    delta: f64,
) -> Result<StationaryReport, BusemannError> {
    let frame = ScalingFrame::new(hz.first).map_err(|e| BusemannError::Invalid(e.to_string()))?;
    let mut thetas = thetas.to_vec();
    thetas.sort_by(f64::total_cmp);
    let mut profiles = Vec::new();
    let mut directions = Vec::new();
    for &theta in &thetas {
        let p = busemann_profile(model, theta, side, xs, hz)?;
        let stats = if delta == 0.0 {
            direction_stats(&p, &p, frame)
        } else {
            direction_stats(&p, &busemann_profile(model, theta + delta, side, xs, hz)?, frame)
        };
        directions.push(stats);
        profiles.push(p);
    }
    let exact = model.exact();
    let mut checked = 0;
    let mut violations = Vec::new();
    for a in 0..profiles.len() {
        for b in a + 1..profiles.len() {
            let (p1, p2) = (&profiles[a], &profiles[b]);
            if p1.theta == p2.theta {
                continue;
            }
            let both: Vec<(f64, f64, f64)> = p1
                .points
                .iter()
                .zip(&p2.points)
                .filter_map(|(u, v)| Some((u.x, u.certified_value()?, v.certified_value()?)))
                .collect();
            for i in 0..both.len() {
                for j in i + 1..both.len() {
                    let lhs = both[j].1 - both[i].1;
                    let rhs = both[j].2 - both[i].2;
                    checked += 1;
                    let tol = if exact { 0.0 } else { 1e-9 * (1.0 + lhs.abs().max(rhs.abs())) };
                    if lhs > rhs + tol {
                        violations.push(QuadrangleViolation {
                            theta1: p1.theta,
                            theta2: p2.theta,
                            x1: both[i].0,
                            x2: both[j].0,
                            lhs,
                            rhs,
                        });
                    }
                }
            }
        }
    }
    Ok(StationaryReport {
        side,
        horizons: *hz,
        delta,
        directions,
        quadrangle_checked: checked,
        quadrangle_violations: violations,
        profiles,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectedWalkReport {
    pub certified: usize,
    pub zero_count: usize,
    /// `None` when the zero set is empty.
    pub dimension: Option<DimensionEstimate>,
    pub lags: Vec<f64>,
    pub variances: Vec<f64>,
    pub slope: f64,
    pub r2: f64,
    pub nonnegative: bool,
    pub warnings: Vec<String>,
}

/// Zero-set dimension, increment regression away from zeros and the sign
/// check of a Busemann gap profile. Only certified first-horizon values enter.
pub fn reflected_walk_diag(profile: &BusemannGapProfile) -> ReflectedWalkReport {
    let frame = profile.frame();
    let vals: Vec<Option<f64>> =
        profile.values.iter().zip(&profile.certified).map(|(v, &c)| if c { v[0] } else { None }).collect();
    let certified = vals.iter().filter(|v| v.is_some()).count();
    let mut warnings = Vec::new();
    if certified < 64 {
        warnings.push(format!("only {certified} certified grid points"));
    }
    let nonnegative = vals.iter().flatten().all(|&v| v >= -1e-9);
    if !nonnegative {
        warnings.push("negative gap value".into());
    }
    let is_zero = |v: f64| v.abs() <= 1e-9;
    let zeros: Vec<[f64; 1]> = profile
        .xs
        .iter()
        .zip(&vals)
        .filter(|(_, v)| v.is_some_and(is_zero))
        .map(|(&x, _)| [frame.space(x)])
        .collect();
    let mesh = frame.space(grid_spacing(&profile.xs));
    let dimension = if zeros.is_empty() {
        warnings.push("empty zero set; dimension undefined".into());
        None
    } else {
        let span = match (profile.xs.first(), profile.xs.last()) {
            (Some(a), Some(b)) => frame.space(b - a),
            _ => 0.0,
        };
        let mut scales = Vec::new();
        let mut s = span / 4.0;
        while s >= 4.0 * mesh {
            scales.push(s);
            s /= 2.0;
        }
        let est = box_dimension(&zeros, &scales);
        if let Some(w) = &est.warning {
            warnings.push(w.clone());
        }
        Some(est)
    };
    let away: Vec<Option<f64>> =
        vals.iter().map(|v| v.filter(|&g| !is_zero(g)).map(|g| frame.fluctuation(g))).collect();
    let (lags, variances) = lag_variances(&away, mesh);
    let (slope, r2) = if lags.len() >= 2 {
        let (_, b, r2) = linear_fit(&lags, &variances);
        (b, r2)
    } else {
        warnings.push("too few increments away from zeros".into());
        (0.0, 0.0)
    };
    ReflectedWalkReport {
        certified,
        zero_count: zeros.len(),
        dimension,
        lags,
        variances,
        slope,
        r2,
        nonnegative,
        warnings,
    }
}
