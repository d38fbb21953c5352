//! Static SVG line plots of sweep tables.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::table::{Table, TableError};

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 560.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 240.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

#[derive(Debug, Error)]
pub enum PlotError {
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("table has no rows")]
    Empty,
    #[error("no columns to plot")]
    NoColumns,
    #[error("no plottable values")]
    NoData,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Default)]
pub struct PlotSpec {
    /// Abscissa column; the first column when unset.
    pub x: Option<String>,
    /// Plotted columns; every other column when unset.
    pub columns: Option<Vec<String>>,
    pub log_y: bool,
    pub title: Option<String>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Pads a degenerate range so it maps to a finite span.
fn span(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

/// Renders one polyline per plotted column.
pub fn render_svg(table: &Table, spec: &PlotSpec) -> Result<String, PlotError> {
    if table.is_empty() {
        return Err(PlotError::Empty);
    }
    let x_name = match &spec.x {
        Some(x) => x.clone(),
        None => table.columns().first().cloned().ok_or(PlotError::NoColumns)?,
    };
    let xs = table.column(&x_name)?;
    let names: Vec<String> = match &spec.columns {
        Some(c) => c.clone(),
        None => table.columns().iter().filter(|c| **c != x_name).cloned().collect(),
    };
    if names.is_empty() {
        return Err(PlotError::NoColumns);
    }
    let transform = |y: f64| {
        if spec.log_y {
            (y > 0.0).then(|| y.log10())
        } else {
            Some(y)
        }
    };
    let mut series = Vec::with_capacity(names.len());
    for name in &names {
        let ys = table.column(name)?;
        let pts: Vec<(f64, f64)> = xs
            .iter()
            .zip(ys)
            .filter_map(|(x, y)| Some((((*x)?), transform(y?)?)))
            .collect();
        series.push(pts);
    }
    let all = series.iter().flatten();
    let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    if !x_lo.is_finite() {
        return Err(PlotError::NoData);
    }
    let (x_lo, x_hi) = span(x_lo, x_hi);
    let (y_lo, y_hi) = span(y_lo, y_hi);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    if let Some(title) = &spec.title {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
            LEFT + plot_w / 2.0,
            escape(title)
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let xv = x_lo + f * (x_hi - x_lo);
        let yv = y_lo + f * (y_hi - y_lo);
        let (xp, yp) = (px(xv), py(yv));
        let y_label = if spec.log_y { 10f64.powf(yv) } else { yv };
        let _ = writeln!(
            svg,
            r#"<line x1="{xp:.2}" y1="{:.2}" x2="{xp:.2}" y2="{:.2}" stroke="black"/><text x="{xp:.2}" y="{:.2}" text-anchor="middle">{xv:.3}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 20.0
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{yp:.2}" x2="{LEFT}" y2="{yp:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{y_label:.3e}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            yp + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        escape(&x_name)
    );
    for (k, (name, pts)) in names.iter().zip(&series).enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let dash = if name.contains("qcrb") || name.contains("snl") {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let points: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5"{dash} points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="1.5"{dash}/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 25.0,
            lx + 30.0,
            ly + 4.0,
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Renders first, so nothing is written when rendering fails.
pub fn write_svg(table: &Table, spec: &PlotSpec, path: &Path) -> Result<(), PlotError> {
    let svg = render_svg(table, spec)?;
    std::fs::write(path, svg)?;
    Ok(())
}
