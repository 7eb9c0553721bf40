// SPDX-License-Identifier: Apache-2.0

//! CSV, JSON and SVG output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    /// Shortest decimal that round-trips to the same `f64`.
    pub fn render(&self) -> String {
        match self {
            Cell::Float(x) => format!("{x:?}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    /// File stem and title.
    pub name: String,
    pub x_label: String,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub manifest: Value,
    pub plots: Vec<Plot>,
}

/// Write `results.csv`, `manifest.json` and one SVG per plot into `out_dir`.
pub fn emit(report: &Report, out_dir: &Path) -> Result<Vec<PathBuf>> {
    if report.rows.is_empty() {
        return Err(Error::InvalidParameter("no result rows to write".into()));
    }
    if let Some(row) = report.rows.iter().find(|r| r.len() != report.header.len()) {
        return Err(Error::DimensionMismatch {
            expected: report.header.len(),
            found: row.len(),
        });
    }
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();

    let csv_path = out_dir.join("results.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    w.write_record(&report.header)?;
    for row in &report.rows {
        w.write_record(row.iter().map(Cell::render))?;
    }
    w.flush()?;
    written.push(csv_path);

    let manifest_path = out_dir.join("manifest.json");
    let mut json = serde_json::to_string_pretty(&report.manifest)?;
    json.push('\n');
    fs::write(&manifest_path, json)?;
    written.push(manifest_path);

    for plot in &report.plots {
        let path = out_dir.join(format!("{}.svg", plot.name));
        fs::write(&path, render_svg(plot))?;
        written.push(path);
    }
    Ok(written)
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn log_range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .filter(|v| *v > 0.0 && v.is_finite())
        .map(f64::log10)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return None;
    }
    if hi - lo < 1e-9 {
        return Some((lo - 0.5, hi + 0.5));
    }
    Some((lo, hi))
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let mut t: Vec<f64> = (lo.ceil() as i64..=hi.floor() as i64).map(|k| k as f64).collect();
    if t.len() < 2 {
        t = vec![lo, hi];
    }
    t
}

fn tick_label(e: f64) -> String {
    if (e - e.round()).abs() < 1e-9 {
        format!("1e{}", e.round() as i64)
    } else {
        format!("{:.3e}", 10f64.powf(e))
    }
}

/// Log-log line plot; nonpositive points are skipped.
pub fn render_svg(plot: &Plot) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        plot.name
    );
    let xr = log_range(plot.series.iter().flat_map(|c| c.x.iter().copied()));
    let yr = log_range(plot.series.iter().flat_map(|c| c.y.iter().copied()));
    let (Some((x0, x1)), Some((y0, y1))) = (xr, yr) else {
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">no positive data</text>"#, WIDTH / 2.0, HEIGHT / 2.0);
        s.push_str("</svg>\n");
        return s;
    };
    let pw = WIDTH - MARGIN_L - MARGIN_R;
    let ph = HEIGHT - MARGIN_T - MARGIN_B;
    let px = |v: f64| MARGIN_L + (v.log10() - x0) / (x1 - x0) * pw;
    let py = |v: f64| MARGIN_T + (1.0 - (v.log10() - y0) / (y1 - y0)) * ph;

    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for e in ticks(x0, x1) {
        let x = MARGIN_L + (e - x0) / (x1 - x0) * pw;
        let yb = MARGIN_T + ph;
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{yb:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, yb + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, yb + 18.0, tick_label(e));
    }
    for e in ticks(y0, y1) {
        let y = MARGIN_T + (1.0 - (e - y0) / (y1 - y0)) * ph;
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN_L}" y2="{y:.2}" stroke="black"/>"#, MARGIN_L - 5.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, MARGIN_L - 8.0, y + 4.0, tick_label(e));
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        MARGIN_L + pw / 2.0,
        HEIGHT - 10.0,
        plot.x_label
    );

    for (i, series) in plot.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<(f64, f64)> = series
            .x
            .iter()
            .zip(&series.y)
            .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
            .map(|(&x, &y)| (px(x), py(y)))
            .collect();
        let line: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            line.join(" ")
        );
        for (x, y) in &pts {
            let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#);
        }
        let ly = MARGIN_T + 16.0 * i as f64 + 8.0;
        let lx = WIDTH - MARGIN_R + 10.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, lx + 25.0, ly + 4.0, series.label);
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report() -> Report {
        Report {
            header: vec!["x".into(), "y".into()],
            rows: vec![
                vec![Cell::Float(0.1), Cell::Float(1.0 / 3.0)],
                vec![Cell::Float(1e-7), Cell::Int(4)],
            ],
            manifest: serde_json::json!({"a": 1.5}),
            plots: vec![Plot {
                name: "y".into(),
                x_label: "x".into(),
                series: vec![Series {
                    label: "y".into(),
                    x: vec![1.0, 10.0, 100.0],
                    y: vec![1.0, 0.5, 0.0],
                }],
            }],
        }
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-7, 123456.789, f64::MIN_POSITIVE, 2.0f64.sqrt()] {
            let s = Cell::Float(x).render();
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn emit_is_deterministic() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let r = report();
        let fa = emit(&r, a.path()).unwrap();
        emit(&r, b.path()).unwrap();
        assert_eq!(fa.len(), 3);
        for f in ["results.csv", "manifest.json", "y.svg"] {
            assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap());
        }
        let csv = fs::read_to_string(a.path().join("results.csv")).unwrap();
        assert_eq!(csv, "x,y\n0.1,0.3333333333333333\n1e-7,4\n");
    }

    #[test]
    fn empty_report_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let mut r = report();
        r.rows.clear();
        assert!(emit(&r, &out).is_err());
        assert!(!out.exists());
    }

    #[test]
    fn svg_without_positive_data() {
        let plot = Plot {
            name: "empty".into(),
            x_label: "x".into(),
            series: vec![Series {
                label: "s".into(),
                x: vec![0.0],
                y: vec![-1.0],
            }],
        };
        let svg = render_svg(&plot);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("no positive data"));
    }
}
