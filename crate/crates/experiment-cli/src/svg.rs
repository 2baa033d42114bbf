use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    /// Side of one grid cell in pixels.
    pub cell: f64,
    pub title: Option<String>,
    /// Fill for cells without a value.
    pub missing: String,
}

impl Default for SvgStyle {
    fn default() -> Self {
        Self { cell: 4.0, title: None, missing: "#d0d0d0".into() }
    }
}

/// Marked cells drawn over a blank grid, one `<rect class="mark">` each.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub color: String,
    pub cells: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy)]
pub enum SvgInput<'a> {
    /// Rows of values; `None` cells use the missing fill.
    Heatmap(&'a [Vec<Option<f64>>]),
    /// A `rows x cols` frame with layers of marked cells.
    Overlay { rows: usize, cols: usize, layers: &'a [Layer] },
}

fn shade(v: f64, lo: f64, hi: f64) -> String {
    let s = if hi > lo { (v - lo) / (hi - lo) } else { 0.0 };
    let g = (255.0 * (1.0 - s)).round().clamp(0.0, 255.0) as u8;
    format!("#{:02x}{:02x}ff", g, g)
}

fn open(out: &mut String, w: f64, h: f64, style: &SvgStyle) {
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1}" height="{h:.1}" viewBox="0 0 {w:.1} {h:.1}">"#)
        .unwrap();
    if let Some(t) = &style.title {
        let t = t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");
        writeln!(out, "<title>{t}</title>").unwrap();
    }
}

/// Deterministic SVG text: same input, same bytes.
pub fn render_svg(input: SvgInput<'_>, style: &SvgStyle) -> String {
    let c = style.cell;
    let mut out = String::new();
    match input {
        SvgInput::Heatmap(rows) => {
            let ncol = rows.iter().map(Vec::len).max().unwrap_or(0);
            let vals = rows.iter().flatten().flatten();
            let lo = vals.clone().copied().fold(f64::INFINITY, f64::min);
            let hi = vals.copied().fold(f64::NEG_INFINITY, f64::max);
            open(&mut out, ncol as f64 * c, rows.len() as f64 * c, style);
            for (i, row) in rows.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    let fill = v.map_or(style.missing.clone(), |v| shade(v, lo, hi));
                    writeln!(
                        out,
                        r#"<rect class="cell" x="{:.1}" y="{:.1}" width="{c:.1}" height="{c:.1}" fill="{fill}"/>"#,
                        j as f64 * c,
                        i as f64 * c
                    )
                    .unwrap();
                }
            }
        }
        SvgInput::Overlay { rows, cols, layers } => {
            let (w, h) = (cols as f64 * c, rows as f64 * c);
            open(&mut out, w, h, style);
            writeln!(out, r#"<rect class="frame" x="0" y="0" width="{w:.1}" height="{h:.1}" fill="white" stroke="black"/>"#)
                .unwrap();
            for layer in layers {
                for &(i, j) in &layer.cells {
                    writeln!(
                        out,
                        r#"<rect class="mark" x="{:.1}" y="{:.1}" width="{c:.1}" height="{c:.1}" fill="{}"/>"#,
                        j as f64 * c,
                        i as f64 * c,
                        layer.color
                    )
                    .unwrap();
                }
            }
        }
    }
    out.push_str("</svg>\n");
    out
}
