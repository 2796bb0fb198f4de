//! Results table and its CSV form: `time,<variant columns>`, one row per
//! checkpoint.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::BenchError;

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub checkpoints: Vec<f64>,
    pub columns: Vec<Column>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    fn check(&self) -> Result<(), BenchError> {
        for c in &self.columns {
            if c.values.len() != self.checkpoints.len() {
                return Err(BenchError::Table(format!(
                    "column {} has {} values for {} checkpoints",
                    c.name,
                    c.values.len(),
                    self.checkpoints.len()
                )));
            }
        }
        Ok(())
    }
}

/// Writes `table` as CSV. A table without columns still gets its rows of
/// checkpoints unless it has no checkpoints either.
pub fn write_csv<W: Write>(table: &Table, out: W) -> Result<(), BenchError> {
    table.check()?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["time".to_string()];
    header.extend(table.columns.iter().map(|c| c.name.clone()));
    w.write_record(&header)?;
    if !table.columns.is_empty() {
        for (i, t) in table.checkpoints.iter().enumerate() {
            let mut row = vec![t.to_string()];
            row.extend(table.columns.iter().map(|c| c.values[i].to_string()));
            w.write_record(&row)?;
        }
    }
    w.flush().map_err(|e| BenchError::io("<csv>", e))?;
    Ok(())
}

pub fn emit_csv(table: &Table, path: &Path) -> Result<(), BenchError> {
    let file = File::create(path).map_err(|e| BenchError::io(path, e))?;
    write_csv(table, file)
}

pub fn read_csv<R: Read>(input: R) -> Result<Table, BenchError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.get(0) != Some("time") {
        return Err(BenchError::Table("first column must be `time`".into()));
    }
    let mut table = Table {
        checkpoints: Vec::new(),
        columns: header
            .iter()
            .skip(1)
            .map(|name| Column {
                name: name.to_string(),
                values: Vec::new(),
            })
            .collect(),
    };
    for record in r.records() {
        let record = record?;
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| BenchError::Table(format!("not a number: {s:?}")))
        };
        table.checkpoints.push(parse(&record[0])?);
        for (col, field) in table.columns.iter_mut().zip(record.iter().skip(1)) {
            col.values.push(parse(field)?);
        }
    }
    table.check()?;
    Ok(table)
}

pub fn load_csv(path: &Path) -> Result<Table, BenchError> {
    let file = File::open(path).map_err(|e| BenchError::io(path, e))?;
    read_csv(file)
}
