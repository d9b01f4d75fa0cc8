//! Tabular output: CSV and JSON emission with lossless number formatting.
//!
//! Every floating-point cell is printed with 17 significant digits
//! (`{:.16e}`), which round-trips `f64` exactly in both formats.

use std::fmt::Write as _;

/// One table cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    /// Unsigned integer (step counts, indices).
    Int(usize),
    /// Floating-point value, emitted with 17 significant digits.
    Num(f64),
    /// Free text (path labels, status tags).
    Text(String),
    /// Absent value: empty CSV field, JSON `null`.
    Empty,
}

impl Cell {
    /// Optional float to cell.
    pub fn opt(value: Option<f64>) -> Cell {
        value.map_or(Cell::Empty, Cell::Num)
    }

    /// Optional integer to cell.
    pub fn opt_int(value: Option<usize>) -> Cell {
        value.map_or(Cell::Empty, Cell::Int)
    }
}

/// Output format selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// A rectangular table with a fixed header.
pub struct Table {
    columns: &'static [&'static str],
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &'static [&'static str]) -> Table {
        Table { columns, rows: Vec::new() }
    }

    /// Append a row; panics if the width disagrees with the header.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match header");
        self.rows.push(row);
    }

    /// Render in the requested format, with a trailing newline.
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Int(v) => {
                        let _ = write!(out, "{v}");
                    }
                    Cell::Num(v) => {
                        let _ = write!(out, "{v:.16e}");
                    }
                    Cell::Text(v) => out.push_str(&csv_escape(v)),
                    Cell::Empty => {}
                }
            }
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> String {
        let mut out = String::from("[");
        for (r, row) in self.rows.iter().enumerate() {
            out.push_str(if r > 0 { ",\n  {" } else { "\n  {" });
            for (i, (name, cell)) in self.columns.iter().zip(row).enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "\"{name}\": ");
                match cell {
                    Cell::Int(v) => {
                        let _ = write!(out, "{v}");
                    }
                    Cell::Num(v) => {
                        let _ = write!(out, "{v:.16e}");
                    }
                    Cell::Text(v) => {
                        let _ = write!(out, "\"{}\"", json_escape(v));
                    }
                    Cell::Empty => out.push_str("null"),
                }
            }
            out.push('}');
        }
        out.push_str("\n]\n");
        out
    }
}

/// Quote a CSV field when it contains a delimiter, quote, or line break.
fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Escape a JSON string body.
fn json_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}
