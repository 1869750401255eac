//! Report envelopes and output plumbing.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::Format;

/// Who produced a report and from which inputs. Everything except
/// `timestamp_unix` is a function of the command line.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub core_version: &'static str,
    pub command: &'static str,
    pub config: serde_json::Value,
    pub timestamp_unix: u64,
}

impl Provenance {
    pub fn new<C: Serialize>(command: &'static str, config: &C) -> Self {
        Provenance {
            tool: env!("CARGO_PKG_NAME"),
            tool_version: env!("CARGO_PKG_VERSION"),
            core_version: apweights_core::VERSION,
            command,
            config: serde_json::to_value(config).expect("config serializes"),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

/// A serialized artifact with its provenance attached as an extra field.
/// Readers of the artifact ignore the extra field.
#[derive(Serialize)]
pub struct Stamped<'a, T: Serialize> {
    #[serde(flatten)]
    pub body: &'a T,
    pub provenance: &'a Provenance,
}

pub fn to_json<T: Serialize>(body: &T, provenance: &Provenance) -> String {
    let mut text =
        serde_json::to_string_pretty(&Stamped { body, provenance }).expect("report serializes");
    text.push('\n');
    text
}

/// Rows of a CSV table; the first row is the header.
pub struct Table(pub Vec<Vec<String>>);

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table(vec![header.iter().map(|s| s.to_string()).collect()])
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.0.push(cells);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for row in &self.0 {
            let cells: Vec<String> = row.iter().map(|c| quote(c)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn quote(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// Number formatting shared by the CSV tables: `inf` for the divergence
/// flag, shortest round-trip form otherwise.
pub fn num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{v}")
    }
}

pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn render<T: Serialize>(
    format: Format,
    body: &T,
    provenance: &Provenance,
    table: impl FnOnce() -> Table,
) -> String {
    match format {
        Format::Json => to_json(body, provenance),
        Format::Csv => table().render(),
    }
}

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}
