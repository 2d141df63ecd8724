//! Result tables and their CSV and JSON encodings.

use serde_json::{json, Value};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    /// Floats with 17 significant digits; `inf`, `-inf` and `nan` spelled out.
    pub fn render(&self) -> String {
        match self {
            Cell::Float(x) if x.is_nan() => "nan".into(),
            Cell::Float(x) if x.is_infinite() => if *x > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(_) => json!(self.render()),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Float(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            Cell::Text(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as u64)
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

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: &'static str,
    /// Empty for labels and indices, `1` for dimensionless numbers.
    pub unit: &'static str,
}

impl Column {
    pub fn header(&self) -> String {
        if self.unit.is_empty() {
            self.name.to_string()
        } else {
            format!("{} [{}]", self.name, self.unit)
        }
    }
}

/// One output file's worth of rows. The schema id names the file and its
/// version; any change of columns bumps the version.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub schema: &'static str,
    pub file: &'static str,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

/// Identifies the run a table belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct Stamp {
    pub seed: u64,
    pub config_hash: String,
}

impl Table {
    pub fn new(schema: &'static str, file: &'static str, columns: &[(&'static str, &'static str)]) -> Self {
        Self { schema, file, columns: columns.iter().map(|&(name, unit)| Column { name, unit }).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "{}", self.schema);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// A `#`-comment line with the schema and stamp, then a header row.
    pub fn to_csv(&self, stamp: &Stamp) -> Result<Vec<u8>, CliError> {
        let mut out = format!("# schema={} seed={} config={}\n", self.schema, stamp.seed, stamp.config_hash).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(self.columns.iter().map(Column::header)).map_err(CliError::from)?;
            for row in &self.rows {
                w.write_record(row.iter().map(Cell::render)).map_err(CliError::from)?;
            }
            w.flush()?;
        }
        Ok(out)
    }

    pub fn to_json(&self, stamp: &Stamp) -> Result<Vec<u8>, CliError> {
        let v = json!({
            "schema": self.schema,
            "seed": stamp.seed,
            "config_hash": stamp.config_hash,
            "columns": self.columns.iter().map(|c| json!({"name": c.name, "unit": c.unit})).collect::<Vec<_>>(),
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        });
        let mut bytes = serde_json::to_vec_pretty(&v).map_err(|e| CliError::Io(e.to_string()))?;
        bytes.push(b'\n');
        Ok(bytes)
    }
}
