use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(&'static str),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(v) if !v.is_finite() => String::new(),
            Cell::F(v) => {
                let a = v.abs();
                if *v == 0.0 || (1e-4..1e15).contains(&a) {
                    format!("{v}")
                } else {
                    format!("{v:e}")
                }
            }
            Cell::I(v) => v.to_string(),
            Cell::S(s) => s.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::I(v) => Value::from(*v),
            Cell::S(s) => Value::from(*s),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::F)
    }
}

/// One quantity on a grid, in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: vec![] }
    }
}

/// Computed data plus whatever the sidecar should record about it.
#[derive(Debug, Clone)]
pub struct Output {
    pub table: Table,
    pub metadata: Map<String, Value>,
}

fn write_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Write { path: path.to_path_buf(), source }
}

fn render(table: &Table, format: Format) -> Result<Vec<u8>, std::io::Error> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(vec![]);
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::csv))?;
            }
            w.into_inner().map_err(|e| e.into_error())
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                .collect();
            let doc = serde_json::json!({ "columns": table.columns, "rows": rows });
            let mut bytes = serde_json::to_vec_pretty(&doc)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

/// Writes `<stem>.<ext>` and `<stem>.meta.json` into `dir`. The data file
/// depends only on the table; the timestamp goes to the sidecar.
pub fn write_output(
    dir: &Path,
    stem: &str,
    format: Format,
    output: &Output,
    header: Map<String, Value>,
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(write_err(dir))?;
    let data_path = dir.join(format!("{stem}.{}", format.extension()));
    let bytes = render(&output.table, format).map_err(write_err(&data_path))?;
    fs::write(&data_path, bytes).map_err(write_err(&data_path))?;

    let mut meta = header;
    meta.insert("data_file".into(), Value::from(data_path.file_name().unwrap().to_string_lossy().into_owned()));
    meta.insert("columns".into(), serde_json::json!(output.table.columns));
    meta.insert("rows".into(), Value::from(output.table.rows.len()));
    meta.insert("metadata".into(), Value::Object(output.metadata.clone()));
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    meta.insert("generated_at_unix".into(), Value::from(now));
    meta.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));

    let meta_path = dir.join(format!("{stem}.meta.json"));
    let mut f = fs::File::create(&meta_path).map_err(write_err(&meta_path))?;
    serde_json::to_writer_pretty(&mut f, &Value::Object(meta))
        .map_err(std::io::Error::from)
        .and_then(|_| f.write_all(b"\n"))
        .map_err(write_err(&meta_path))?;
    Ok(vec![data_path, meta_path])
}
