use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::Result;
use crate::spectral::dump::write_atomic;

pub const SCHEMA: &str = "v1";

/// Round-trippable double: 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// The JSON summary every command writes.
#[derive(Debug, Serialize)]
pub struct Summary {
    pub schema: &'static str,
    pub command: &'static str,
    pub config: Value,
    pub results: Map<String, Value>,
    /// `results.<key>` → `module.operation` that produced it.
    pub provenance: BTreeMap<String, String>,
    pub artifacts: Vec<String>,
}

impl Summary {
    pub fn new(command: &'static str, config: impl Serialize) -> Result<Self> {
        Ok(Summary {
            schema: SCHEMA,
            command,
            config: serde_json::to_value(config)?,
            results: Map::new(),
            provenance: BTreeMap::new(),
            artifacts: Vec::new(),
        })
    }

    pub fn put(&mut self, key: &str, value: impl Serialize, provenance: &str) -> Result<()> {
        self.results.insert(key.to_string(), serde_json::to_value(value)?);
        self.provenance.insert(format!("results.{key}"), provenance.to_string());
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// A CSV table held in memory and written once.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| std::io::Error::other(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.into_inner().map_err(|e| std::io::Error::other(e.to_string()).into())
    }
}

/// Output directory with the list of files written so far.
pub struct Sink {
    pub dir: PathBuf,
}

impl Sink {
    pub fn new(dir: PathBuf) -> Result<Self> {
        std::fs::create_dir_all(&dir)?;
        Ok(Sink { dir })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn csv(&self, summary: &mut Summary, name: &str, table: &Table) -> Result<()> {
        write_atomic(&self.path(name), &table.to_bytes()?)?;
        summary.artifacts.push(name.to_string());
        Ok(())
    }

    pub fn summary(&self, summary: &Summary) -> Result<PathBuf> {
        let path = self.path(&format!("{}.json", summary.command));
        write_atomic(&path, summary.to_json()?.as_bytes())?;
        Ok(path)
    }
}
