//! Column tables rendered as CSV or JSON, plus gnuplot scripts that read the CSV.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Flag(bool),
    Text(&'static str),
    /// Written as `nan` in CSV and `null` in JSON.
    Missing,
}

/// Shortest round-trip form, switching to exponent notation for very small
/// or very large magnitudes.
fn write_real(out: &mut String, v: f64) {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        write!(out, "{v}").unwrap();
    } else {
        write!(out, "{v:e}").unwrap();
    }
}

impl Cell {
    fn csv(&self, out: &mut String) {
        match *self {
            Cell::Int(v) => write!(out, "{v}").unwrap(),
            Cell::Real(v) if v.is_finite() => write_real(out, v),
            Cell::Real(v) if v.is_nan() => out.push_str("nan"),
            Cell::Real(v) => out.push_str(if v > 0.0 { "inf" } else { "-inf" }),
            Cell::Flag(v) => out.push_str(if v { "true" } else { "false" }),
            Cell::Text(v) => out.push_str(v),
            Cell::Missing => out.push_str("nan"),
        }
    }

    fn json(&self) -> Value {
        match *self {
            Cell::Int(v) => Value::from(v),
            Cell::Real(v) => serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number),
            Cell::Flag(v) => Value::Bool(v),
            Cell::Text(v) => Value::from(v),
            Cell::Missing => Value::Null,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format {other:?} (csv, json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Trailing `# key=value` lines in CSV, a `summary` object in JSON.
    pub summary: Vec<(&'static str, Cell)>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(24 * (self.rows.len() + 1) * self.columns.len());
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                cell.csv(&mut out);
            }
            out.push('\n');
        }
        for (key, cell) in &self.summary {
            write!(out, "# {key}=").unwrap();
            cell.csv(&mut out);
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(k, c)| (k.to_string(), c.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut top = Map::new();
        top.insert("rows".into(), Value::Array(rows));
        if !self.summary.is_empty() {
            let summary: Map<String, Value> = self.summary.iter().map(|(k, c)| (k.to_string(), c.json())).collect();
            top.insert("summary".into(), Value::Object(summary));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("table serializes");
        s.push('\n');
        s
    }
}

/// Gnuplot script plotting column `y` against column `x` (1-based) of a CSV
/// written by [`Table::to_csv`].
pub fn gnuplot_script(table: &Table, data: &Path, x: usize, y: usize, points: bool) -> String {
    let xl = table.columns[x - 1];
    let yl = table.columns[y - 1];
    let style = if points {
        "points pt 7 ps 0.3"
    } else {
        "linespoints pt 7 ps 0.5"
    };
    let mut s = String::new();
    writeln!(s, "set datafile separator ','").unwrap();
    writeln!(s, "set datafile commentschars '#'").unwrap();
    writeln!(s, "set xlabel '{xl}'").unwrap();
    writeln!(s, "set ylabel '{yl}'").unwrap();
    writeln!(s, "set key off").unwrap();
    let path = data.display().to_string().replace('\'', "''");
    writeln!(s, "plot '{path}' every ::1 using {x}:{y} with {style}").unwrap();
    s
}
