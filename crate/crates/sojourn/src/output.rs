//! CSV and JSON writers. Every file starts with a metadata block: model
//! spec, seed, number of random streams and the tool version. Nothing in it
//! depends on the clock or the host, so equal inputs give equal bytes.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use serde::Serialize;

pub const VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub version: &'static str,
    pub model: String,
    pub seed: u64,
    pub streams: u64,
    /// Run parameters and derived scalars, written in this order.
    pub params: Vec<(&'static str, f64)>,
}

impl Header {
    pub fn new(model: impl Into<String>, seed: u64, streams: u64) -> Self {
        Self { version: VERSION, model: model.into(), seed, streams, params: Vec::new() }
    }

    pub fn param(mut self, key: &'static str, value: f64) -> Self {
        self.params.push((key, value));
        self
    }

    fn to_json(&self) -> serde_json::Value {
        let mut meta = serde_json::Map::new();
        meta.insert("version".into(), self.version.into());
        meta.insert("model".into(), self.model.clone().into());
        meta.insert("seed".into(), self.seed.into());
        meta.insert("streams".into(), self.streams.into());
        for (k, v) in &self.params {
            meta.insert((*k).into(), json_number(*v));
        }
        serde_json::Value::Object(meta)
    }
}

fn json_number(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

/// Opens `path` for writing, or stdout when `path` is `None`.
pub fn open_output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

/// Writes `# key: value` header lines, the column names and the rows.
pub fn write_csv<W, R, I>(mut out: W, header: &Header, columns: &[&str], rows: I) -> anyhow::Result<()>
where
    W: Write,
    R: IntoIterator<Item = String>,
    I: IntoIterator<Item = R>,
{
    writeln!(out, "# sojourn {}", header.version)?;
    writeln!(out, "# model: {}", header.model)?;
    writeln!(out, "# seed: {}", header.seed)?;
    writeln!(out, "# streams: {}", header.streams)?;
    for (k, v) in &header.params {
        writeln!(out, "# {k}: {v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `{"meta": header, ...body}` as pretty JSON.
pub fn write_json<W: Write, T: Serialize>(mut out: W, header: &Header, body: &T) -> anyhow::Result<()> {
    let mut value = serde_json::to_value(body)?;
    let obj = value.as_object_mut().context("JSON body must be an object")?;
    let mut doc = serde_json::Map::new();
    doc.insert("meta".into(), header.to_json());
    doc.extend(std::mem::take(obj));
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}
