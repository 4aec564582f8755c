use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub points: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Seconds.
    pub wall_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckReport {
    pub fn new(id: impl Into<String>, points: usize, max_residual: f64, tolerance: f64, wall_time: f64) -> Self {
        Self {
            id: id.into(),
            points,
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
            wall_time,
            error: None,
        }
    }

    pub fn failed(id: impl Into<String>, tolerance: f64, wall_time: f64, error: String) -> Self {
        Self {
            id: id.into(),
            points: 0,
            max_residual: f64::INFINITY,
            tolerance,
            pass: false,
            wall_time,
            error: Some(error),
        }
    }
}

/// Plain-text table of reports.
pub fn format_reports(reports: &[CheckReport]) -> String {
    let width = reports.iter().map(|r| r.id.len()).max().unwrap_or(2).max(2);
    let mut out = format!(
        "{:<width$}  {:>6}  {:>12}  {:>10}  {:>8}  result\n",
        "id", "points", "max_residual", "tolerance", "time_s"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<width$}  {:>6}  {:>12.3e}  {:>10.1e}  {:>8.3}  {}",
            r.id,
            r.points,
            r.max_residual,
            r.tolerance,
            r.wall_time,
            if r.pass { "pass" } else { "FAIL" }
        );
        if let Some(e) = &r.error {
            let _ = writeln!(out, "    error: {e}");
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_number(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

/// 17 significant digits, enough to round-trip any double.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_csv(&self, config_json: &str) -> String {
        let mut out = format!("# config: {config_json}\n{}\n", self.header.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, config_json: &str, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv(config_json))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0] {
            let s = format_number(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_number(-1.0), "-1.0000000000000000e0");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(vec!["a".into(), "b".into(), "c".into()]);
        t.push(vec![Cell::Int(1), Cell::Num(0.5), Cell::Empty]);
        t.push(vec![Cell::Int(2), Cell::Text("x".into()), Cell::Num(-2.0)]);
        let csv = t.to_csv("{}");
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# config: {}");
        assert_eq!(lines[1], "a,b,c");
        assert_eq!(lines[2], "1,5.0000000000000000e-1,");
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn pass_flag_follows_tolerance() {
        assert!(CheckReport::new("a", 1, 1e-9, 1e-9, 0.0).pass);
        assert!(!CheckReport::new("a", 1, 2e-9, 1e-9, 0.0).pass);
        assert!(!CheckReport::new("a", 1, f64::NAN, 1.0, 0.0).pass);
        assert!(!CheckReport::failed("a", 1.0, 0.0, "boom".into()).pass);
    }
}
