//! Artifact emission: versioned CSV/JSON tables, minimal hand-emitted
//! SVG line charts, and atomic file writes.
//!
//! Every format opens with a version line so readers can detect stale
//! artifacts; all numeric cells go through [`fmt_num`] so reruns with
//! the same inputs produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde_json::{json, Value};
use thiserror::Error;

/// Format revision stamped into every emitted artifact.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportError {
    #[error("chart needs at least one series with at least one point")]
    EmptyChart,
    #[error("log-scale chart requires positive coordinates, got ({x}, {y})")]
    NonPositiveLogPoint { x: f64, y: f64 },
    #[error("table row has {got} cells, header has {expected}")]
    RaggedRow { expected: usize, got: usize },
}

/// Fixed six-decimal rendering used for every numeric cell and
/// coordinate, so identical runs emit identical bytes.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.6}")
}

/// The version header line for an artifact of the given kind, e.g.
/// `# rclab sweep v1`.
pub fn version_line(kind: &str) -> String {
    format!("# rclab {kind} v{FORMAT_VERSION}")
}

/// A rectangular table of pre-formatted cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Append one row; its width must match the header.
    pub fn push(&mut self, row: Vec<String>) -> Result<(), ReportError> {
        if row.len() != self.columns.len() {
            return Err(ReportError::RaggedRow {
                expected: self.columns.len(),
                got: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    /// CSV document: version line, header, then rows.
    pub fn to_csv(&self, kind: &str) -> String {
        let mut out = version_line(kind);
        out.push('\n');
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// JSON document with the version recorded in a `format` field.
    pub fn to_json(&self, kind: &str) -> String {
        let doc: Value = json!({
            "format": format!("rclab {kind} v{FORMAT_VERSION}"),
            "columns": self.columns,
            "rows": self.rows,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("tables serialize");
        text.push('\n');
        text
    }
}

/// One polyline on a chart.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: &str, points: Vec<(f64, f64)>) -> Self {
        Series {
            label: label.to_string(),
            points,
        }
    }
}

/// Axis scaling for [`svg_line_chart`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    /// Both axes in log₁₀; every coordinate must be positive.
    LogLog,
}

const CHART_W: f64 = 640.0;
const CHART_H: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn svg_coord(x: f64) -> String {
    format!("{x:.2}")
}

/// Render a minimal self-contained line chart: axes, min/max tick
/// labels, one colored polyline with point markers per series, and a
/// legend.  No external plotting dependency; output is deterministic.
pub fn svg_line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    scale: Scale,
) -> Result<String, ReportError> {
    if series.is_empty() || series.iter().all(|s| s.points.is_empty()) {
        return Err(ReportError::EmptyChart);
    }
    let transform = |x: f64, y: f64| -> Result<(f64, f64), ReportError> {
        match scale {
            Scale::Linear => Ok((x, y)),
            Scale::LogLog => {
                if x <= 0.0 || y <= 0.0 {
                    return Err(ReportError::NonPositiveLogPoint { x, y });
                }
                Ok((x.log10(), y.log10()))
            }
        }
    };
    let mut mapped: Vec<(usize, Vec<(f64, f64)>)> = Vec::new();
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for (idx, s) in series.iter().enumerate() {
        let mut pts = Vec::with_capacity(s.points.len());
        for &(x, y) in &s.points {
            let (tx, ty) = transform(x, y)?;
            x_min = x_min.min(tx);
            x_max = x_max.max(tx);
            y_min = y_min.min(ty);
            y_max = y_max.max(ty);
            pts.push((tx, ty));
        }
        mapped.push((idx, pts));
    }
    // Degenerate ranges still need a finite plot box.
    if x_max - x_min < 1e-12 {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if y_max - y_min < 1e-12 {
        y_min -= 0.5;
        y_max += 0.5;
    }
    let plot_w = CHART_W - MARGIN_L - MARGIN_R;
    let plot_h = CHART_H - MARGIN_T - MARGIN_B;
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        (
            MARGIN_L + (x - x_min) / (x_max - x_min) * plot_w,
            MARGIN_T + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h,
        )
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{CHART_W}\" height=\"{CHART_H}\" \
         viewBox=\"0 0 {CHART_W} {CHART_H}\">"
    );
    let _ = writeln!(svg, "<!-- rclab svg v{FORMAT_VERSION} -->");
    let _ = writeln!(
        svg,
        "<rect x=\"0\" y=\"0\" width=\"{CHART_W}\" height=\"{CHART_H}\" fill=\"white\"/>"
    );
    let axis_suffix = match scale {
        Scale::Linear => "",
        Scale::LogLog => " (log10)",
    };
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"monospace\" \
         font-size=\"16\">{}</text>",
        svg_coord(CHART_W / 2.0),
        xml_escape(title)
    );
    // Axes.
    let (x0, y0) = (MARGIN_L, CHART_H - MARGIN_B);
    let _ = writeln!(
        svg,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        svg_coord(x0),
        svg_coord(MARGIN_T),
        svg_coord(x0),
        svg_coord(y0)
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        svg_coord(x0),
        svg_coord(y0),
        svg_coord(CHART_W - MARGIN_R),
        svg_coord(y0)
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" \
         font-size=\"12\">{}{}</text>",
        svg_coord(MARGIN_L + plot_w / 2.0),
        svg_coord(CHART_H - 12.0),
        xml_escape(x_label),
        axis_suffix
    );
    let _ = writeln!(
        svg,
        "<text x=\"14\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" \
         font-size=\"12\" transform=\"rotate(-90 14 {})\">{}{}</text>",
        svg_coord(MARGIN_T + plot_h / 2.0),
        svg_coord(MARGIN_T + plot_h / 2.0),
        xml_escape(y_label),
        axis_suffix
    );
    // Range labels at the axis ends.
    for (value, px, py, anchor) in [
        (x_min, x0, y0 + 16.0, "middle"),
        (x_max, CHART_W - MARGIN_R, y0 + 16.0, "middle"),
        (y_min, x0 - 6.0, y0, "end"),
        (y_max, x0 - 6.0, MARGIN_T + 4.0, "end"),
    ] {
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"{anchor}\" font-family=\"monospace\" \
             font-size=\"10\">{}</text>",
            svg_coord(px),
            svg_coord(py),
            fmt_num(value)
        );
    }
    // Series polylines, markers, legend.
    for (series_idx, pts) in &mapped {
        let color = PALETTE[series_idx % PALETTE.len()];
        if !pts.is_empty() {
            let coords: Vec<String> = pts
                .iter()
                .map(|&(x, y)| {
                    let (px, py) = to_px(x, y);
                    format!("{},{}", svg_coord(px), svg_coord(py))
                })
                .collect();
            let _ = writeln!(
                svg,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
                coords.join(" ")
            );
            for &(x, y) in pts {
                let (px, py) = to_px(x, y);
                let _ = writeln!(
                    svg,
                    "<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"{color}\"/>",
                    svg_coord(px),
                    svg_coord(py)
                );
            }
        }
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" \
             fill=\"{color}\">{}</text>",
            svg_coord(MARGIN_L + 8.0),
            svg_coord(MARGIN_T + 14.0 + 14.0 * *series_idx as f64),
            xml_escape(&series[*series_idx].label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Write `contents` to `path` atomically: the bytes land in a sibling
/// temporary file which is then renamed over the target, so readers
/// never observe a half-written artifact.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = Path::new(&tmp);
    fs::write(tmp, contents)?;
    match fs::rename(tmp, path) {
        Ok(()) => Ok(()),
        Err(e) => {
            let _ = fs::remove_file(tmp);
            Err(e)
        }
    }
}
