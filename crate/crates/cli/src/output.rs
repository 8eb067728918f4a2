//! JSON-lines and CSV record sinks.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::{Map, Value};

use crate::config::{CliResult, Format};

/// Records share one echoed config; each row adds its own fields.
pub struct Report {
    pub config: Value,
    pub rows: Vec<Map<String, Value>>,
}

impl Report {
    pub fn new(config: Value) -> Self {
        Report { config, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Value) {
        match row {
            Value::Object(m) => self.rows.push(m),
            other => panic!("report rows must be objects, got {other}"),
        }
    }
}

pub fn write_report(report: &Report, format: Format, out: Option<&Path>) -> CliResult<()> {
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    match format {
        Format::Jsonl => write_jsonl(report, &mut w)?,
        Format::Csv => write_csv(report, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn write_jsonl<W: Write>(report: &Report, w: &mut W) -> CliResult<()> {
    for row in &report.rows {
        let mut rec = Map::new();
        rec.insert("config".into(), report.config.clone());
        rec.extend(row.clone());
        serde_json::to_writer(&mut *w, &Value::Object(rec)).map_err(io::Error::other)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

fn write_csv<W: Write>(report: &Report, w: &mut W) -> CliResult<()> {
    let mut columns: Vec<&str> = Vec::new();
    for row in &report.rows {
        for k in row.keys() {
            if !columns.contains(&k.as_str()) {
                columns.push(k);
            }
        }
    }
    let mut out = csv::Writer::from_writer(w);
    let mut header = columns.clone();
    header.push("config");
    out.write_record(&header)?;
    let config = report.config.to_string();
    for row in &report.rows {
        let mut rec: Vec<String> = columns.iter().map(|c| cell(row.get(*c))).collect();
        rec.push(config.clone());
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}
