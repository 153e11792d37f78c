//! CSV, JSON and SVG writers for [`Dataset`]s.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scan::Dataset;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            _ => Err(Error::Unknown {
                kind: "output format",
                value: s.to_string(),
            }),
        }
    }
}

/// Fixed-point with 12 decimals; locale independent.
pub fn format_number(v: f64) -> String {
    let s = format!("{v:.12}");
    // Avoid "-0.000000000000".
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn cell(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format_number(x),
        _ => String::new(),
    }
}

/// Header row followed by one line per row, `\n` terminated. Missing values
/// are empty cells.
pub fn to_csv(d: &Dataset) -> String {
    let mut out = d.columns.join(",");
    out.push('\n');
    for row in &d.rows {
        let line: Vec<String> = row.0.iter().map(|v| cell(*v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct JsonDataset<'a> {
    columns: &'a [String],
    rows: Vec<Vec<Option<f64>>>,
}

/// `{"columns": [...], "rows": [[...], ...]}` with `null` for missing values.
pub fn to_json(d: &Dataset) -> Result<String> {
    let doc = JsonDataset {
        columns: &d.columns,
        rows: d
            .rows
            .iter()
            .map(|r| r.0.iter().map(|v| v.filter(|x| x.is_finite())).collect())
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Error::Numeric(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn to_json_value<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Numeric(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];
const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Line plot of every column against the first one. Missing values break the
/// polyline.
pub fn to_svg(d: &Dataset, x_label: &str, y_label: &str) -> String {
    let xs: Vec<Option<f64>> = d
        .rows
        .iter()
        .map(|r| r.0.first().copied().flatten())
        .collect();
    let (x0, x1) = range(xs.iter().flatten().copied());
    let (y0, y1) = range(
        d.rows
            .iter()
            .flat_map(|r| r.0.iter().skip(1).flatten().copied()),
    );
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{left},{top} L{left},{bottom} L{right},{bottom}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let xv = x0 + t * (x1 - x0);
        let yv = y0 + t * (y1 - y0);
        let (tx, ty) = (px(xv), py(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{tx:.2}" y1="{bottom}" x2="{tx:.2}" y2="{:.2}" stroke="black"/><text x="{tx:.2}" y="{:.2}" text-anchor="middle">{xv:.3}</text>"#,
            bottom + 5.0,
            bottom + 18.0
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ty:.2}" x2="{left}" y2="{ty:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{yv:.3}</text>"#,
            left - 5.0,
            left - 8.0,
            ty + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{:.2}" text-anchor="middle" transform="rotate(-90 15 {:.2})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );

    for (j, name) in d.columns.iter().enumerate().skip(1) {
        let colour = PALETTE[(j - 1) % PALETTE.len()];
        let mut segments: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
        for (row, x) in d.rows.iter().zip(&xs) {
            match (x, row.0.get(j).copied().flatten()) {
                (Some(x), Some(y)) if y.is_finite() => segments
                    .last_mut()
                    .expect("non-empty")
                    .push((px(*x), py(y))),
                _ => {
                    if !segments.last().expect("non-empty").is_empty() {
                        segments.push(Vec::new());
                    }
                }
            }
        }
        for seg in segments.iter().filter(|seg| !seg.is_empty()) {
            let pts: Vec<String> = seg.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
                pts.join(" ")
            );
        }
        let ly = top + 14.0 * j as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            right - 90.0,
            right - 70.0,
            right - 65.0,
            ly + 4.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn render(d: &Dataset, format: Format, labels: (&str, &str)) -> Result<String> {
    match format {
        Format::Csv => Ok(to_csv(d)),
        Format::Json => to_json(d),
        Format::Svg => Ok(to_svg(d, labels.0, labels.1)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scan::ScanRow;

    fn sample() -> Dataset {
        Dataset {
            columns: vec!["x".into(), "mu_0".into(), "mu_1".into()],
            rows: vec![
                ScanRow(vec![Some(0.0), Some(1.0), None]),
                ScanRow(vec![Some(0.5), Some(-0.0), Some(0.25)]),
            ],
        }
    }

    #[test]
    fn csv_layout() {
        let csv = to_csv(&sample());
        assert_eq!(
            csv,
            "x,mu_0,mu_1\n0.000000000000,1.000000000000,\n0.500000000000,0.000000000000,0.250000000000\n"
        );
    }

    #[test]
    fn json_round_trip() {
        let j = to_json(&sample()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(v["columns"][1], "mu_0");
        assert!(v["rows"][0][2].is_null());
        assert_eq!(v["rows"][1][2], 0.25);
    }

    #[test]
    fn svg_is_well_formed_enough() {
        let svg = to_svg(&sample(), "x", "y");
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(">mu_1</text>"));
    }

    #[test]
    fn formats_parse() {
        assert_eq!("CSV".parse::<Format>().unwrap(), Format::Csv);
        assert!("xml".parse::<Format>().is_err());
    }
}
