//! Minimal deterministic SVG plots. Coordinates are printed with fixed
//! precision so the same table always yields the same bytes.

use std::fmt::Write as _;

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        self.rows.push(row);
    }

    fn column(&self, name: &str) -> CliResult<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| CliError::validation(format!("no column named {name:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    Line,
    Scatter,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub x: String,
    pub ys: Vec<String>,
    pub kind: PlotKind,
}

impl PlotSpec {
    pub fn new(title: &str, x: &str, ys: &[&str], kind: PlotKind) -> Self {
        PlotSpec {
            title: title.into(),
            x: x.into(),
            ys: ys.iter().map(|s| s.to_string()).collect(),
            kind,
        }
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;
const COLOURS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    if hi - lo > 0.0 {
        (lo, hi)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

/// Renders the chosen columns as an SVG document.
pub fn emit_plot(table: &Table, spec: &PlotSpec) -> CliResult<String> {
    if table.rows.is_empty() {
        return Err(CliError::validation("cannot plot an empty table"));
    }
    if spec.ys.is_empty() {
        return Err(CliError::validation("plot needs at least one y column"));
    }
    if let Some(row) = table.rows.iter().find(|r| r.len() != table.columns.len()) {
        return Err(CliError::validation(format!("row of width {} in a table with {} columns", row.len(), table.columns.len())));
    }
    if table.rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(CliError::validation("table contains non-finite values"));
    }
    let xi = table.column(&spec.x)?;
    let yis: Vec<usize> = spec.ys.iter().map(|y| table.column(y)).collect::<CliResult<_>>()?;
    let (x0, x1) = range(table.rows.iter().map(|r| r[xi]));
    let (y0, y1) = range(table.rows.iter().flat_map(|r| yis.iter().map(move |&j| r[j])));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(&spec.title));
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        svg,
        r#"<path d="M{left:.2} {top:.2} L{left:.2} {bottom:.2} L{right:.2} {bottom:.2}" stroke="black" fill="none"/>"#
    );
    for (x, y, anchor, text) in [
        (left, bottom + 16.0, "start", x0),
        (right, bottom + 16.0, "end", x1),
    ] {
        let _ = writeln!(svg, r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}">{text:.4e}</text>"#);
    }
    for (y, text) in [(bottom, y0), (top, y1)] {
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{text:.4e}</text>"#, left - 4.0, y + 4.0);
    }
    let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 12.0, escape(&spec.x));

    for (series, &j) in yis.iter().enumerate() {
        let colour = COLOURS[series % COLOURS.len()];
        let pts: Vec<(f64, f64)> = table.rows.iter().map(|r| (sx(r[xi]), sy(r[j]))).collect();
        if spec.kind == PlotKind::Line && pts.len() > 1 {
            let d: Vec<String> = pts
                .iter()
                .enumerate()
                .map(|(i, (x, y))| format!("{}{x:.2} {y:.2}", if i == 0 { "M" } else { "L" }))
                .collect();
            let _ = writeln!(svg, r#"<path d="{}" stroke="{colour}" fill="none" stroke-width="1.5"/>"#, d.join(" "));
        } else {
            for (x, y) in &pts {
                let _ = writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{colour}"/>"#);
            }
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" fill="{colour}">{}</text>"#,
            right - 120.0,
            top + 14.0 * series as f64,
            escape(&spec.ys[series])
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
