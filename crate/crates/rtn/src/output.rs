//! Row writers for CSV and JSON lines.
//!
//! CSV files start with `#` comment lines (schema, metadata, column
//! glossary) followed by a normal header row. JSON-lines files carry the
//! same metadata in a first `{"meta": …}` object. Rows are flushed every
//! [`FLUSH_EVERY`] rows so an interrupted run keeps its data.

use std::io::{self, Write};

use clap::ValueEnum;
use serde::Serialize;

pub const FLUSH_EVERY: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    JsonLines,
}

enum Sink<W: Write> {
    Csv(Box<csv::Writer<W>>),
    Json(W),
}

/// Streams serializable rows in one format.
pub struct RowWriter<W: Write> {
    sink: Sink<W>,
    format: Format,
    rows: usize,
}

impl<W: Write> RowWriter<W> {
    /// Writes the preamble. `meta` pairs become `# key=value` lines (CSV)
    /// or members of the meta object (JSON lines); `columns` documents the
    /// CSV columns.
    pub fn new(
        mut out: W,
        format: Format,
        schema: &str,
        meta: &[(&str, String)],
        columns: &str,
    ) -> io::Result<Self> {
        let sink = match format {
            Format::Csv => {
                writeln!(out, "# schema={schema}")?;
                for (k, v) in meta {
                    writeln!(out, "# {k}={v}")?;
                }
                writeln!(out, "# columns: {columns}")?;
                Sink::Csv(Box::new(csv::WriterBuilder::new().has_headers(true).from_writer(out)))
            }
            Format::JsonLines => {
                let mut obj = serde_json::Map::new();
                obj.insert("schema".into(), schema.into());
                for (k, v) in meta {
                    obj.insert((*k).into(), v.clone().into());
                }
                let line = serde_json::json!({ "meta": obj });
                writeln!(out, "{line}")?;
                Sink::Json(out)
            }
        };
        Ok(Self { sink, format, rows: 0 })
    }

    pub fn write<T: Serialize>(&mut self, row: &T) -> io::Result<()> {
        match &mut self.sink {
            Sink::Csv(w) => w.serialize(row).map_err(io::Error::other)?,
            Sink::Json(w) => {
                serde_json::to_writer(&mut *w, row)?;
                w.write_all(b"\n")?;
            }
        }
        self.rows += 1;
        if self.rows.is_multiple_of(FLUSH_EVERY) {
            self.flush()?;
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn flush(&mut self) -> io::Result<()> {
        match &mut self.sink {
            Sink::Csv(w) => w.flush(),
            Sink::Json(w) => w.flush(),
        }
    }

    /// Appends trailing metadata (for example the wall time) and flushes.
    pub fn finish(mut self, trailer: &[(&str, String)]) -> io::Result<W> {
        self.flush()?;
        let mut out = match self.sink {
            Sink::Csv(w) => w.into_inner().map_err(|e| io::Error::other(e.to_string()))?,
            Sink::Json(w) => w,
        };
        if !trailer.is_empty() {
            match self.format {
                Format::Csv => {
                    for (k, v) in trailer {
                        writeln!(out, "# {k}={v}")?;
                    }
                }
                Format::JsonLines => {
                    let obj: serde_json::Map<String, serde_json::Value> =
                        trailer.iter().map(|(k, v)| ((*k).to_string(), v.clone().into())).collect();
                    writeln!(out, "{}", serde_json::json!({ "trailer": obj }))?;
                }
            }
        }
        out.flush()?;
        Ok(out)
    }
}
