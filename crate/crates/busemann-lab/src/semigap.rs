use gap_lab::{slice_minima, MinimumKind};
use model_core::{ScalingFrame, SpaceTimePoint};
use network_classifier::{Model, NetworkType};
use passage_engine::{same_value, Chain, Side};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::busemann::busemann;
use crate::coalescence::coalescence_point;
use crate::geometry::{DirectionTarget, Horizons};
use crate::scan::ExceptionalDirection;
use crate::BusemannError;

/// `L(x -> p_L) + L(x -> p_R) - L_2(x^2 -> (p_L, p_R))`; `None` without a disjoint pair.
pub fn gap_to_anchors(
    model: Model<'_>,
    x: &SpaceTimePoint,
    p_left: &SpaceTimePoint,
    p_right: &SpaceTimePoint,
) -> Result<Option<f64>, BusemannError> {
    let Some(l2) = model.disjoint2(&(*x, *x), &(*p_left, *p_right))? else {
        return Ok(None);
    };
    Ok(Some(model.passage_value(x, p_left)? + model.passage_value(x, p_right)? - l2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusemannGapProfile {
    pub theta: f64,
    pub horizons: Horizons,
    pub xs: Vec<f64>,
    /// Values at the first and second horizon.
    pub values: Vec<[Option<f64>; 2]>,
    /// Equal values at both horizons after the geodesics from `x` joined both witnesses.
    pub certified: Vec<bool>,
}

impl BusemannGapProfile {
    pub fn first(&self) -> Vec<Option<f64>> {
        self.values.iter().map(|v| v[0]).collect()
    }

    pub fn certified_count(&self) -> usize {
        self.certified.iter().filter(|&&c| c).count()
    }

    pub fn frame(&self) -> ScalingFrame {
        ScalingFrame::new(self.horizons.first).expect("positive horizon")
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("theta,x,value,certified\n");
        for ((x, v), c) in self.xs.iter().zip(&self.values).zip(&self.certified) {
            let v = v[0].map_or("NA".to_string(), |v| v.to_string());
            s.push_str(&format!("{},{x},{v},{c}\n", self.theta));
        }
        s
    }
}

struct Witnesses {
    anchors: [(SpaceTimePoint, SpaceTimePoint); 2],
    chains: [(Chain, Chain); 2],
}

impl Witnesses {
    fn new(model: Model<'_>, exc: &ExceptionalDirection, hz: &Horizons) -> Result<Self, BusemannError> {
        let origin = hz.origin(model);
        let mut anchors = Vec::new();
        let mut chains = Vec::new();
        for h in hz.both() {
            let pl = DirectionTarget::new(model, exc.theta_below, hz.base, h)?.endpoint;
            let pr = DirectionTarget::new(model, exc.theta_above, hz.base, h)?.endpoint;
            chains.push((model.geodesic(&origin, &pl, exc.sides.0)?, model.geodesic(&origin, &pr, exc.sides.1)?));
            anchors.push((pl, pr));
        }
        Ok(Self { anchors: [anchors[0], anchors[1]], chains: [chains[0].clone(), chains[1].clone()] })
    }
}

/// The Busemann gap toward an exceptional direction, anchored at the witness endpoints.
pub fn busemann_gap(
    model: Model<'_>,
    exc: &ExceptionalDirection,
    xs: &[f64],
    hz: &Horizons,
) -> Result<BusemannGapProfile, BusemannError> {
    let w = Witnesses::new(model, exc, hz)?;
    let rows: Result<Vec<(f64, [Option<f64>; 2], bool)>, BusemannError> = xs
        .par_iter()
        .map(|&x| {
            let s = hz.start(model, x);
            let mut values = [None; 2];
            let mut joined = true;
            for (k, h) in hz.both().into_iter().enumerate() {
                let (pl, pr) = w.anchors[k];
                values[k] = gap_to_anchors(model, &s, &pl, &pr)?;
                let gl = model.geodesic(&s, &pl, exc.sides.0)?;
                let gr = model.geodesic(&s, &pr, exc.sides.1)?;
                let cl = coalescence_point(&gl, &w.chains[k].0)?;
                let cr = coalescence_point(&gr, &w.chains[k].1)?;
                joined &= cl.t < hz.base + h && cr.t < hz.base + h;
            }
            let agree = match values {
                [Some(a), Some(b)] => same_value(a, b, model.exact()),
                _ => false,
            };
            Ok((s.x, values, joined && agree))
        })
        .collect();
    let rows = rows?;
    Ok(BusemannGapProfile {
        theta: exc.theta,
        horizons: *hz,
        xs: rows.iter().map(|r| r.0).collect(),
        values: rows.iter().map(|r| r.1).collect(),
        certified: rows.iter().map(|r| r.2).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SemiInfiniteType {
    IIa,
    III,
    IV,
    Va,
    Vb,
    Other,
}

impl SemiInfiniteType {
    pub fn label(self) -> &'static str {
        match self {
            SemiInfiniteType::IIa => "IIa_inf",
            SemiInfiniteType::III => "III_inf",
            SemiInfiniteType::IV => "IV_inf",
            SemiInfiniteType::Va => "Va_inf",
            SemiInfiniteType::Vb => "Vb_inf",
            SemiInfiniteType::Other => "other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemiInfiniteReport {
    pub dictionary: SemiInfiniteType,
    pub geometric: SemiInfiniteType,
    /// Shared stretches `S`, closed excursions `X` and the final split `T`.
    pub pattern: String,
}

/// Dictionary reading of the semi-infinite type at grid index `k`.
///
/// Zeros are read through one-sided isolation at the smallest radius, in
/// space units rescaled by the first horizon; positive values through strict
/// plateau minima.
pub fn classify_semi_infinite_gap(profile: &BusemannGapProfile, k: usize, radii: &[f64], exact: bool) -> SemiInfiniteType {
    let v = profile.first();
    if k == 0 || k + 1 >= v.len() {
        return SemiInfiniteType::Other;
    }
    let Some(g) = v[k] else { return SemiInfiniteType::Other };
    let frame = profile.frame();
    let is_zero = |g: f64| if exact { g == 0.0 } else { g.abs() <= 1e-9 };
    if is_zero(g) {
        let r = radii.iter().copied().fold(f64::INFINITY, f64::min);
        let near = |i: usize| v[i].is_some_and(is_zero) && frame.space((profile.xs[i] - profile.xs[k]).abs()) <= r;
        let left_isolated = !(0..k).any(near);
        let right_isolated = !(k + 1..v.len()).any(near);
        return match (left_isolated, right_isolated) {
            (false, false) => SemiInfiniteType::IV,
            (true, false) => SemiInfiniteType::Va,
            (false, true) => SemiInfiniteType::Vb,
            (true, true) => SemiInfiniteType::Other,
        };
    }
    let mut lo = k;
    while lo > 0 && v[lo - 1].is_some() {
        lo -= 1;
    }
    let mut hi = k;
    while hi + 1 < v.len() && v[hi + 1].is_some() {
        hi += 1;
    }
    let seg: Vec<f64> = v[lo..=hi].iter().map(|g| g.unwrap()).collect();
    if slice_minima(&seg).iter().any(|m| m.kind == MinimumKind::Strict && m.contains(k - lo)) {
        SemiInfiniteType::III
    } else {
        SemiInfiniteType::IIa
    }
}

/// Tokens for two geodesics from one start to different ends.
fn split_pattern(left: &[SpaceTimePoint], right: &[SpaceTimePoint]) -> String {
    let mut out = String::new();
    let (mut i, mut j) = (0, 0);
    loop {
        if i + 1 >= left.len() || j + 1 >= right.len() {
            out.push('T');
            return out;
        }
        if left[i + 1] == right[j + 1] {
            i += 1;
            j += 1;
            if !out.ends_with('S') {
                out.push('S');
            }
            continue;
        }
        let (mut a, mut b) = (i + 1, j + 1);
        // A meeting at the common last site is the terminal split, not an excursion.
        let (la, lb) = (left.len() - 1, right.len() - 1);
        while a < la && b < lb && left[a] != right[b] {
            if left[a].t < right[b].t {
                a += 1;
            } else if left[a].t > right[b].t {
                b += 1;
            } else {
                a += 1;
                b += 1;
            }
        }
        if a >= la || b >= lb {
            out.push('T');
            return out;
        }
        out.push('X');
        (i, j) = (a, b);
    }
}

/// Both readings of the semi-infinite network type at grid index `k` of `profile`.
///
/// The geometric side compares the geodesics from `x` toward the two witness
/// anchors at the first horizon, taken on the witness sides; a bridge is a site on one of them, off the
/// other, lying on a geodesic from `x` to the other anchor.
pub fn classify_semi_infinite(
    model: Model<'_>,
    exc: &ExceptionalDirection,
    profile: &BusemannGapProfile,
    k: usize,
    radii: &[f64],
) -> Result<SemiInfiniteReport, BusemannError> {
    let dictionary = classify_semi_infinite_gap(profile, k, radii, model.exact());
    let hz = profile.horizons;
    let s = hz.start(model, profile.xs[k]);
    let pl = DirectionTarget::new(model, exc.theta_below, hz.base, hz.first)?.endpoint;
    let pr = DirectionTarget::new(model, exc.theta_above, hz.base, hz.first)?.endpoint;
    if pl == pr {
        // One anchor: the semi-infinite network is the finite one from `x`.
        let r = network_classifier::geometric_report(&model.network(&s, &pl)?);
        let geometric = match r.tag {
            NetworkType::IIa => SemiInfiniteType::IIa,
            NetworkType::III => SemiInfiniteType::III,
            NetworkType::IV => SemiInfiniteType::IV,
            NetworkType::Va => SemiInfiniteType::Va,
            NetworkType::Vb => SemiInfiniteType::Vb,
            _ => SemiInfiniteType::Other,
        };
        return Ok(SemiInfiniteReport { dictionary, geometric, pattern: r.pattern });
    }
    let gl = model.geodesic(&s, &pl, exc.sides.0)?.graph();
    let gr = model.geodesic(&s, &pr, exc.sides.1)?.graph();
    let pattern = split_pattern(&gl, &gr);
    let geometric = match pattern.as_str() {
        "ST" => SemiInfiniteType::IIa,
        "XST" | "XT" => SemiInfiniteType::III,
        "T" => {
            let only = |a: &[SpaceTimePoint], b: &[SpaceTimePoint]| -> Vec<SpaceTimePoint> {
                a[1..a.len() - 1].iter().filter(|p| !b.contains(p)).copied().collect()
            };
            let mut l2r = false;
            for p in only(&gl, &gr) {
                if model.on_optimal(&s, &pr, &p)? {
                    l2r = true;
                    break;
                }
            }
            let mut r2l = false;
            for q in only(&gr, &gl) {
                if model.on_optimal(&s, &pl, &q)? {
                    r2l = true;
                    break;
                }
            }
            match (l2r, r2l) {
                (false, false) => SemiInfiniteType::IV,
                (true, false) => SemiInfiniteType::Va,
                (false, true) => SemiInfiniteType::Vb,
                (true, true) => SemiInfiniteType::Other,
            }
        }
        _ => SemiInfiniteType::Other,
    };
    Ok(SemiInfiniteReport { dictionary, geometric, pattern })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    /// `G(x) - [B_L^{θ1}(x) + B_R^{θ2}(x) - 𝔅^{θ1,θ2}(x)]` at each horizon.
    pub residuals: [Option<f64>; 2],
    /// Some input lacked a certificate.
    pub provisional: bool,
}

/// Residual of the identity linking the Busemann gap with one- and two-path
/// Busemann functions for directions `θ1 < θ < θ2`.
pub fn horizon_identity_residual(
    model: Model<'_>,
    exc: &ExceptionalDirection,
    theta1: f64,
    theta2: f64,
    x: f64,
    hz: &Horizons,
) -> Result<IdentityResidual, BusemannError> {
    if !(theta1 < exc.theta && exc.theta < theta2) {
        return Err(BusemannError::Invalid(format!("need {theta1} < {} < {theta2}", exc.theta)));
    }
    let bl = busemann(model, theta1, x, Side::Left, hz)?;
    let br = busemann(model, theta2, x, Side::Right, hz)?;
    let g = busemann_gap(model, exc, &[x], hz)?;
    let mut residuals = [None; 2];
    for (k, h) in hz.both().into_iter().enumerate() {
        let two = crate::busemann::two_path_busemann(model, theta1, theta2, x, hz.base, h)?;
        if let (Some(gv), Some(two)) = (g.values[0][k], two) {
            residuals[k] = Some(gv - (bl.values[k] + br.values[k] - two));
        }
    }
    let provisional = bl.certificate.is_none() || br.certificate.is_none() || !g.certified[0];
    Ok(IdentityResidual { residuals, provisional })
}
