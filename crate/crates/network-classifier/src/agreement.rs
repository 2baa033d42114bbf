use gap_lab::{gap_sheet_lattice, zero_set, LatticeGrid};
use model_core::rng::Stream;
use model_core::{make_lattice_field, LatticeField, Law};
use passage_engine::lattice;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dictionary::classify_gap_with;
use crate::geometric::{classify_geometric_coarse, geometric_report};
use crate::{ClassifyError, NetworkType};

/// Random lattice sheets and interior grid points to classify on them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementSpec {
    pub seed: u64,
    pub law: Law,
    pub horizon: usize,
    /// Sheet width; at most `horizon / 2` keeps every pair connectable.
    pub width: usize,
    pub fields: usize,
    /// Total points, spread evenly over the fields.
    pub points: usize,
    pub radii: Vec<f64>,
    /// Excursions shorter than this fraction of the time span are closed for the coarse type.
    #[serde(default = "default_coarse_fraction")]
    pub coarse_fraction: f64,
}

pub const DEFAULT_COARSE_FRACTION: f64 = 0.1;

fn default_coarse_fraction() -> f64 {
    DEFAULT_COARSE_FRACTION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub field: usize,
    pub i: usize,
    pub j: usize,
    pub x: f64,
    pub y: f64,
    pub gap: Option<f64>,
    pub geometric: NetworkType,
    pub dictionary: NetworkType,
    /// Geometric type with short excursions closed.
    pub coarse: NetworkType,
    pub three_star: bool,
    pub disjoint: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementMatrix {
    pub labels: Vec<String>,
    /// `counts[geometric][dictionary]`.
    pub counts: Vec<Vec<u64>>,
    /// `coarse_counts[coarse geometric][dictionary]`.
    pub coarse_counts: Vec<Vec<u64>>,
    pub samples: u64,
    /// Points where the geometric type is a zero type exactly when the gap vanishes.
    pub zero_split_agree: u64,
    /// Points where the extremal geodesics are disjoint exactly when the gap vanishes.
    pub disjoint_split_agree: u64,
    /// Zero gaps whose disjoint extremal geodesics carry bridges both ways.
    pub bidirectional_zeros: u64,
    pub zero_gaps: u64,
    pub three_star_events: u64,
    pub spec: Option<AgreementSpec>,
}

impl AgreementMatrix {
    pub fn from_records(records: &[ClassificationRecord], spec: Option<AgreementSpec>) -> Self {
        let mut counts = vec![vec![0u64; 8]; 8];
        let mut coarse_counts = vec![vec![0u64; 8]; 8];
        let mut agree = 0;
        let mut zeros = 0;
        let mut stars = 0;
        let mut disjoint_agree = 0;
        let mut bidirectional = 0;
        for r in records {
            counts[r.geometric.index()][r.dictionary.index()] += 1;
            coarse_counts[r.coarse.index()][r.dictionary.index()] += 1;
            let zero = r.gap == Some(0.0);
            agree += u64::from(r.geometric.is_zero_type() == zero);
            zeros += u64::from(zero);
            stars += u64::from(r.three_star);
            disjoint_agree += u64::from(r.disjoint == zero);
            bidirectional += u64::from(zero && r.disjoint && r.geometric == NetworkType::Other && !r.three_star);
        }
        Self {
            labels: NetworkType::ALL.iter().map(|t| t.label().to_string()).collect(),
            counts,
            coarse_counts,
            samples: records.len() as u64,
            zero_split_agree: agree,
            disjoint_split_agree: disjoint_agree,
            bidirectional_zeros: bidirectional,
            zero_gaps: zeros,
            three_star_events: stars,
            spec,
        }
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        (0..8).map(|j| self.counts.iter().map(|r| r[j]).sum()).collect()
    }

    pub fn get(&self, geometric: NetworkType, dictionary: NetworkType) -> u64 {
        self.counts[geometric.index()][dictionary.index()]
    }

    pub fn zero_split_rate(&self) -> f64 {
        if self.samples == 0 {
            return 1.0;
        }
        self.zero_split_agree as f64 / self.samples as f64
    }

    pub fn disjoint_split_rate(&self) -> f64 {
        if self.samples == 0 {
            return 1.0;
        }
        self.disjoint_split_agree as f64 / self.samples as f64
    }

    /// Fraction of points with geometric type in `types` whose dictionary type matches.
    pub fn agreement_on(&self, types: &[NetworkType]) -> Option<f64> {
        diagonal_rate(&self.counts, types)
    }

    /// As [`Self::agreement_on`] with the coarse geometric type.
    pub fn coarse_agreement_on(&self, types: &[NetworkType]) -> Option<f64> {
        diagonal_rate(&self.coarse_counts, types)
    }

    pub fn to_csv(&self) -> String {
        self.csv(&self.counts, "geometric")
    }

    pub fn coarse_to_csv(&self) -> String {
        self.csv(&self.coarse_counts, "coarse")
    }

    fn csv(&self, counts: &[Vec<u64>], corner: &str) -> String {
        let mut s = format!("{corner},{}\n", self.labels.join(","));
        for (label, row) in self.labels.iter().zip(counts) {
            let cells: Vec<String> = row.iter().map(u64::to_string).collect();
            s.push_str(&format!("{label},{}\n", cells.join(",")));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix serializes")
    }
}

fn diagonal_rate(counts: &[Vec<u64>], types: &[NetworkType]) -> Option<f64> {
    let total: u64 = types.iter().map(|t| counts[t.index()].iter().sum::<u64>()).sum();
    let hits: u64 = types.iter().map(|t| counts[t.index()][t.index()]).sum();
    (total > 0).then(|| hits as f64 / total as f64)
}

pub const RECORD_CSV_HEADER: &str = "x,y,G,geometric,gap,coarse";

pub fn records_csv(records: &[ClassificationRecord]) -> String {
    let mut s = format!("{RECORD_CSV_HEADER}\n");
    for r in records {
        let g = r.gap.map_or("NA".to_string(), |g| g.to_string());
        s.push_str(&format!("{},{},{},{},{},{}\n", r.x, r.y, g, r.geometric, r.dictionary, r.coarse));
    }
    s
}

/// Classifies grid points `(i, j)` of the sheet of `field` over `grid` both ways.
pub fn classify_points(
    field: &LatticeField,
    grid: &LatticeGrid,
    points: &[(usize, usize)],
    radii: &[f64],
    coarse_fraction: f64,
    tag: usize,
) -> Result<Vec<ClassificationRecord>, ClassifyError> {
    let sheet = gap_sheet_lattice(field, grid)?;
    let zeros = zero_set(&sheet);
    points
        .par_iter()
        .map(|&(i, j)| {
            let net = lattice::network(field, grid.source(i), grid.sink(j))?;
            let geo = geometric_report(&net);
            Ok(ClassificationRecord {
                field: tag,
                i,
                j,
                x: sheet.xs[i],
                y: sheet.ys[j],
                gap: sheet.get(i, j),
                geometric: geo.tag,
                dictionary: classify_gap_with(&sheet, &zeros, i, j, radii),
                coarse: classify_geometric_coarse(&net, coarse_fraction),
                three_star: geo.three_star,
                disjoint: geo.disjoint,
            })
        })
        .collect()
}

/// Samples interior sheet points on random lattice fields and classifies each both ways.
pub fn agreement_matrix(spec: &AgreementSpec) -> Result<(AgreementMatrix, Vec<ClassificationRecord>), ClassifyError> {
    let grid = LatticeGrid::centered(spec.width, spec.horizon);
    let side = grid.field_side();
    let mut records = Vec::with_capacity(spec.points);
    for f in 0..spec.fields {
        let field_seed = Stream::new(spec.seed, 0, f as u64).next_u64();
        let field = make_lattice_field(field_seed, side, side, spec.law.clone())
            .map_err(|e| ClassifyError::NotASite(e.to_string()))?;
        let n = spec.points / spec.fields + usize::from(f < spec.points % spec.fields);
        let mut rng = Stream::new(spec.seed, 1, f as u64);
        let interior = spec.width.saturating_sub(2).max(1) as u64;
        let picks: Vec<(usize, usize)> = (0..n)
            .map(|_| (1 + (rng.next_u64() % interior) as usize, 1 + (rng.next_u64() % interior) as usize))
            .collect();
        records.extend(classify_points(&field, &grid, &picks, &spec.radii, spec.coarse_fraction, f)?);
    }
    Ok((AgreementMatrix::from_records(&records, Some(spec.clone())), records))
}
