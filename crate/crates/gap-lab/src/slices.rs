use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MinimumKind {
    /// Both neighbours of the run are strictly larger.
    Strict,
    /// The slice is one constant run.
    Weak,
    /// The run touches the left end and its right neighbour is larger.
    LeftSided,
    /// The run touches the right end and its left neighbour is larger.
    RightSided,
}

/// A maximal constant run `start..=end` of a slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlateauMinimum {
    pub start: usize,
    pub end: usize,
    pub kind: MinimumKind,
}

impl PlateauMinimum {
    pub fn contains(&self, i: usize) -> bool {
        self.start <= i && i <= self.end
    }
}

/// Plateau minima of a slice.
///
/// One-sided minima are boundary records, named after the end they touch.
/// Interior runs count only when both neighbours are strictly larger.
pub fn slice_minima(slice: &[f64]) -> Vec<PlateauMinimum> {
    let n = slice.len();
    let mut out = Vec::new();
    let mut a = 0;
    while a < n {
        let mut b = a;
        while b + 1 < n && slice[b + 1] == slice[a] {
            b += 1;
        }
        let v = slice[a];
        let left = (a > 0).then(|| slice[a - 1] > v);
        let right = (b + 1 < n).then(|| slice[b + 1] > v);
        let kind = match (left, right) {
            (None, None) => Some(MinimumKind::Weak),
            (Some(true), Some(true)) => Some(MinimumKind::Strict),
            (None, Some(true)) => Some(MinimumKind::LeftSided),
            (Some(true), None) => Some(MinimumKind::RightSided),
            _ => None,
        };
        if let Some(kind) = kind {
            out.push(PlateauMinimum { start: a, end: b, kind });
        }
        a = b + 1;
    }
    out
}

/// Whether index `i` lies in a strict plateau minimum.
pub fn has_strict_minimum_at(slice: &[f64], i: usize) -> bool {
    slice_minima(slice).iter().any(|m| m.kind == MinimumKind::Strict && m.contains(i))
}

/// `slice[i] <= slice[i + 1]`: no smaller value immediately to the right.
pub fn is_right_sided_minimum(slice: &[f64], i: usize) -> bool {
    i + 1 < slice.len() && slice[i] <= slice[i + 1]
}
