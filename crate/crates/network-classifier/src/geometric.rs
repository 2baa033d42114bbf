use model_core::SpaceTimePoint;
use passage_engine::GeodesicNetwork;
use serde::{Deserialize, Serialize};

use crate::NetworkType;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricReport {
    pub tag: NetworkType,
    /// Shared stretches `S` and excursions `X` of the extremal geodesics, source to sink.
    pub pattern: String,
    /// Source or sink of degree above two.
    pub three_star: bool,
    /// The extremal geodesics share no site besides the anchors.
    pub disjoint: bool,
}

/// A run of the extremal geodesics between consecutive shared sites: shared
/// (`S`) or apart (`X`), with its start and end times.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Run {
    kind: char,
    t0: f64,
    t1: f64,
}

/// Walks the two extremal geodesics together, merging adjacent shared edges.
fn runs(left: &[SpaceTimePoint], right: &[SpaceTimePoint]) -> Vec<Run> {
    let mut out: Vec<Run> = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i + 1 < left.len() || j + 1 < right.len() {
        if i + 1 < left.len() && j + 1 < right.len() && left[i + 1] == right[j + 1] {
            match out.last_mut() {
                Some(r) if r.kind == 'S' => r.t1 = left[i + 1].t,
                _ => out.push(Run { kind: 'S', t0: left[i].t, t1: left[i + 1].t }),
            }
            i += 1;
            j += 1;
            continue;
        }
        let (mut a, mut b) = (i + 1, j + 1);
        while left[a] != right[b] {
            if left[a].t < right[b].t {
                a += 1;
            } else if left[a].t > right[b].t {
                b += 1;
            } else {
                a += 1;
                b += 1;
            }
        }
        out.push(Run { kind: 'X', t0: left[i].t, t1: left[a].t });
        (i, j) = (a, b);
    }
    out
}

fn pattern_of(runs: &[Run]) -> String {
    runs.iter().map(|r| r.kind).collect()
}

fn tag_of(pattern: &str, net: &GeodesicNetwork, three_star: bool) -> NetworkType {
    if three_star {
        return NetworkType::Other;
    }
    match pattern {
        "S" | "" => NetworkType::I,
        "SX" => NetworkType::IIa,
        "XS" => NetworkType::IIb,
        "XSX" | "XX" => NetworkType::III,
        "X" => match (net.bridges.left_to_right, net.bridges.right_to_left) {
            (false, false) => NetworkType::IV,
            (true, false) => NetworkType::Va,
            (false, true) => NetworkType::Vb,
            (true, true) => NetworkType::Other,
        },
        _ => NetworkType::Other,
    }
}

pub fn geometric_report(net: &GeodesicNetwork) -> GeometricReport {
    let pattern = pattern_of(&runs(&net.leftmost.graph(), &net.rightmost.graph()));
    let three_star = net.out_degree(0) > 2 || net.in_degree(1) > 2;
    let tag = tag_of(&pattern, net, three_star);
    GeometricReport { disjoint: pattern == "X", tag, pattern, three_star }
}

/// Geometric type after closing excursions shorter than `min_fraction` of the
/// source-to-sink time span. A single excursion covering the whole span is
/// never closed, so zero types are unchanged.
pub fn classify_geometric_coarse(net: &GeodesicNetwork, min_fraction: f64) -> NetworkType {
    let mut rs = runs(&net.leftmost.graph(), &net.rightmost.graph());
    let three_star = net.out_degree(0) > 2 || net.in_degree(1) > 2;
    if let (Some(first), Some(last)) = (rs.first(), rs.last()) {
        let span = last.t1 - first.t0;
        if rs.len() > 1 {
            for r in &mut rs {
                if r.kind == 'X' && r.t1 - r.t0 < min_fraction * span {
                    r.kind = 'S';
                }
            }
        }
    }
    let mut pattern = String::new();
    for r in &rs {
        if !(r.kind == 'S' && pattern.ends_with('S')) {
            pattern.push(r.kind);
        }
    }
    tag_of(&pattern, net, three_star)
}

/// Network type from where the leftmost and rightmost geodesics coincide.
pub fn classify_geometric(net: &GeodesicNetwork) -> NetworkType {
    geometric_report(net).tag
}
