//! Plot-ready data files. Everything downstream (the figures) is drawn from
//! plain `series,x,y` CSV so the plotting side stays tool-agnostic.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::aggregate::RatioTable;
use crate::AnalyzerError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub series: String,
    pub x: f64,
    pub y: f64,
}

impl PlotPoint {
    pub fn new(series: &str, x: f64, y: f64) -> PlotPoint {
        PlotPoint {
            series: series.to_string(),
            x,
            y,
        }
    }
}

/// Turns an ECDF into plot points under one series label.
pub fn ecdf_points(series: &str, ecdf: &[(f64, f64)]) -> Vec<PlotPoint> {
    ecdf.iter()
        .map(|&(x, y)| PlotPoint::new(series, x, y))
        .collect()
}

/// Writes points as CSV with a `series,x,y` header. Output is sorted by
/// series then x, so regenerating from the same data is byte-identical.
pub fn emit_csv(points: &[PlotPoint], path: &Path) -> Result<(), AnalyzerError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut ordered: Vec<&PlotPoint> = points.iter().collect();
    ordered.sort_by(|a, b| {
        (&a.series, a.x, a.y)
            .partial_cmp(&(&b.series, b.x, b.y))
            .expect("non-NaN plot points")
    });
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(file, "series,x,y")?;
    for p in ordered {
        writeln!(file, "{},{},{}", p.series, p.x, p.y)?;
    }
    file.flush()?;
    Ok(())
}

/// Reads a CSV written by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<PlotPoint>, AnalyzerError> {
    let text = std::fs::read_to_string(path)?;
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let malformed = |message: &str| AnalyzerError::Malformed {
            line: i + 1,
            message: message.to_string(),
        };
        let mut parts = line.splitn(3, ',');
        let series = parts.next().ok_or_else(|| malformed("missing series"))?;
        let x: f64 = parts
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| malformed("bad x"))?;
        let y: f64 = parts
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| malformed("bad y"))?;
        points.push(PlotPoint::new(series, x, y));
    }
    Ok(points)
}

/// Renders a ratio table as a GitHub-flavored markdown table.
pub fn emit_markdown_table(title: &str, table: &RatioTable) -> String {
    let mut out = String::new();
    out.push_str(&format!("| {} | value | baseline | ratio |\n", title));
    out.push_str("|---|---|---|---|\n");
    for row in &table.rows {
        out.push_str(&format!(
            "| {} | {:.2} | {:.2} | {:.1}x |\n",
            row.label, row.numerator, row.denominator, row.ratio
        ));
    }
    out
}
