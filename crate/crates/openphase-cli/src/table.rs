//! CSV tables with `#` metadata lines.

use std::fmt::Write as _;

/// Significant digits of every floating-point cell.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u8> for Cell {
    fn from(x: u8) -> Self {
        Cell::Int(x.into())
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// `x` in scientific notation with [`SIGNIFICANT_DIGITS`] digits; `NaN`, `inf`, `-inf`
/// for non-finite values.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        // Normalizes −0 to 0.
        format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x + 0.0)
    }
}

/// Text cells may not break the CSV structure.
fn format_text(s: &str) -> String {
    s.replace([',', '\n', '\r'], ";")
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    /// Metadata lines, written with a `# ` prefix.
    pub metadata: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { metadata: Vec::new(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    /// Append metadata, splitting multi-line text into separate lines.
    pub fn note(&mut self, text: &str) {
        self.metadata.extend(text.lines().map(str::to_string));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in &self.metadata {
            if line.is_empty() {
                out.push_str("#\n");
            } else {
                let _ = writeln!(out, "# {line}");
            }
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|cell| match cell {
                    Cell::Int(i) => i.to_string(),
                    Cell::Float(x) => format_float(*x),
                    Cell::Text(s) => format_text(s),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}
