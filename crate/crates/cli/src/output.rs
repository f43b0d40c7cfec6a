use std::io::{self, Write};

use serde::Serialize;
use serde_json::Value;

/// A numeric table with a formula note per column.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Column {
    pub name: &'static str,
    pub formula: &'static str,
}

pub const fn col(name: &'static str, formula: &'static str) -> Column {
    Column { name, formula }
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// `#`-prefixed formula lines, a header row, then one record per row.
    pub fn write_csv<W: Write>(&self, mut out: W, precision: usize) -> io::Result<()> {
        for c in &self.columns {
            writeln!(out, "# {}: {}", c.name, c.formula)?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns.iter().map(|c| c.name))?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&v| fmt_sig(v, precision)))?;
        }
        w.flush()
    }

    pub fn to_json(&self, precision: usize) -> Value {
        serde_json::json!({
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(|&v| num(v, precision)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// Scientific notation with `precision` significant digits; small integers print as such.
pub fn fmt_sig(v: f64, precision: usize) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else if v.is_finite() {
        format!("{:.*e}", precision.saturating_sub(1), v)
    } else {
        format!("{v}")
    }
}

/// `v` rounded to `precision` significant digits as a JSON number (`null` if not finite).
pub fn num(v: f64, precision: usize) -> Value {
    if v.is_finite() {
        let rounded: f64 = fmt_sig(v, precision).parse().expect("formatted float parses");
        Value::from(rounded)
    } else {
        Value::Null
    }
}

/// Rounds every floating-point number inside `value`.
pub fn round_json(value: Value, precision: usize) -> Value {
    match value {
        Value::Number(n) if !n.is_i64() && !n.is_u64() => num(n.as_f64().unwrap_or(f64::NAN), precision),
        Value::Array(items) => Value::Array(items.into_iter().map(|v| round_json(v, precision)).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v, precision))).collect()),
        other => other,
    }
}

pub fn write_json<W: Write>(mut out: W, value: &Value) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)
}
