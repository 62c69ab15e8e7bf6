use crate::config::{Format, RunConfig};
use crate::error::CliError;
use num_complex::Complex64;
use qmvop::numerics::Herm2;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};
use std::fs::File;
use std::io::{self, Write};

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Bool(bool),
    Text(String),
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Int(v) => s.serialize_i64(*v),
            Cell::Num(v) => s.serialize_f64(*v),
            Cell::Bool(v) => s.serialize_bool(*v),
            Cell::Text(v) => s.serialize_str(v),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table {
            header: header.iter().map(|h| h.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Column names `{prefix}{i}{j}_re`, `{prefix}{i}{j}_im` in row-major order.
pub fn matrix_columns(prefix: &str) -> Vec<String> {
    let mut cols = Vec::with_capacity(8);
    for i in 0..2 {
        for j in 0..2 {
            cols.push(format!("{prefix}{i}{j}_re"));
            cols.push(format!("{prefix}{i}{j}_im"));
        }
    }
    cols
}

pub fn matrix_cells(m: &Herm2) -> Vec<Cell> {
    m.m.iter().flatten().flat_map(|z| [Cell::Num(z.re), Cell::Num(z.im)]).collect()
}

pub fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

pub fn matrix_json(m: &Herm2) -> Value {
    Value::Array(
        m.m.iter()
            .map(|row| Value::Array(row.iter().map(|z| complex_json(*z)).collect()))
            .collect(),
    )
}

/// Result of one command: a JSON document body, its CSV rendering and
/// whether every check held.
pub struct Output {
    pub command: &'static str,
    pub body: Value,
    pub table: Table,
    pub passed: bool,
}

fn envelope(cfg: &RunConfig, out: &Output) -> Value {
    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": out.command,
        "family": cfg.family.name(),
        "parameters": cfg.params_json(),
        "n_max": cfg.n_max,
        "tol": cfg.tol,
    });
    if let (Value::Object(d), Value::Object(b)) = (&mut doc, &out.body) {
        d.extend(b.clone());
    }
    doc
}

fn render(cfg: &RunConfig, out: &Output, w: &mut dyn Write) -> Result<(), CliError> {
    match cfg.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *w, &envelope(cfg, out))?;
            writeln!(w)?;
        }
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(w);
            csv.write_record(&out.table.header)?;
            for row in &out.table.rows {
                csv.serialize(row)?;
            }
            csv.flush()?;
        }
    }
    Ok(())
}

pub fn emit(cfg: &RunConfig, out: &Output) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => {
            let mut f = io::BufWriter::new(File::create(path)?);
            render(cfg, out, &mut f)?;
            f.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            render(cfg, out, &mut lock)?;
        }
    }
    Ok(())
}
