//! Plain-text point and rule files.
//!
//! Header lines start with `# ` and hold `key: value` pairs; every other
//! non-empty line is whitespace-separated numbers (`x y`, `x y f` or
//! `x y w`).

use std::io::{self, BufRead, Write};

use crate::cubature::CubatureRule;
use crate::error::{Error, Result};
use crate::Point;

/// Parsed contents of a text file: header pairs and numeric rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TextTable {
    pub header: Vec<(String, String)>,
    pub rows: Vec<Vec<f64>>,
}

impl TextTable {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// First two columns as points.
    pub fn points(&self) -> Vec<Point> {
        self.rows.iter().map(|r| Point::new(r[0], r[1])).collect()
    }

    /// Column `k` if every row has it.
    pub fn column(&self, k: usize) -> Option<Vec<f64>> {
        self.rows.iter().map(|r| r.get(k).copied()).collect()
    }
}

pub fn write_table<W: Write>(mut out: W, header: &[(&str, String)], rows: &[Vec<f64>]) -> io::Result<()> {
    for (k, v) in header {
        writeln!(out, "# {k}: {v}")?;
    }
    for r in rows {
        let line: Vec<String> = r.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn write_points<W: Write>(out: W, header: &[(&str, String)], pts: &[Point]) -> io::Result<()> {
    let rows: Vec<Vec<f64>> = pts.iter().map(|p| vec![p.x, p.y]).collect();
    write_table(out, header, &rows)
}

pub fn write_rule<W: Write>(out: W, rule: &CubatureRule<f64>) -> io::Result<()> {
    let header = [
        ("domain", serde_json::to_string(&rule.domain).expect("domain serializes")),
        ("degree", rule.degree.to_string()),
        ("nodes", rule.len().to_string()),
    ];
    let rows: Vec<Vec<f64>> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(p, &w)| vec![p.x, p.y, w])
        .collect();
    write_table(out, &header, &rows)
}

/// Reads a table, requiring at least `min_cols` numbers on every row.
pub fn read_table<R: BufRead>(input: R, min_cols: usize) -> Result<TextTable> {
    let mut table = TextTable::default();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::Config(format!("read error: {e}")))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(h) = line.strip_prefix('#') {
            if let Some((k, v)) = h.split_once(':') {
                table.header.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        if row.len() < min_cols {
            return Err(Error::Config(format!(
                "line {}: expected at least {min_cols} columns, found {}",
                i + 1,
                row.len()
            )));
        }
        table.rows.push(row);
    }
    Ok(table)
}
