use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

pub const SCHEMA: &str = "fim-schema v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Rows plus `key=value` metadata, rendered in one of the two formats.
pub struct Table<R> {
    pub command: &'static str,
    pub meta: Vec<(String, Value)>,
    pub rows: Vec<R>,
    /// Replaces `rows` in JSON output when set.
    pub document: Option<Value>,
}

impl<R: Serialize> Table<R> {
    pub fn new(command: &'static str, rows: Vec<R>) -> Self {
        Self {
            command,
            meta: Vec::new(),
            rows,
            document: None,
        }
    }

    pub fn meta(mut self, key: &str, value: impl Serialize) -> Self {
        self.meta.push((key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null)));
        self
    }

    pub fn document(mut self, doc: impl Serialize) -> Self {
        self.document = serde_json::to_value(doc).ok();
        self
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => self.csv(),
            Format::Json => {
                let meta: serde_json::Map<String, Value> = self.meta.iter().cloned().collect();
                let body = match &self.document {
                    Some(d) => d.clone(),
                    None => json!(self.rows),
                };
                let doc = json!({
                    "schema": SCHEMA,
                    "command": self.command,
                    "meta": meta,
                    "data": body,
                });
                let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Numeric(e.to_string()))?;
                out.push(b'\n');
                Ok(out)
            }
        }
    }

    fn csv(&self) -> Result<Vec<u8>, CliError> {
        let mut out = format!("# {SCHEMA}\n# command={}\n", self.command).into_bytes();
        for (k, v) in &self.meta {
            let v = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            writeln!(out, "# {k}={v}").expect("write to memory");
        }
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row).map_err(|e| CliError::Numeric(format!("csv: {e}")))?;
        }
        w.into_inner().map_err(|e| CliError::Numeric(format!("csv: {e}")))
    }
}

/// Write to `path` through a sibling temporary file and a rename, so a
/// reader never sees a partial file. Without a path, write to stdout.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut stdout = std::io::stdout().lock();
        return stdout
            .write_all(bytes)
            .and_then(|_| stdout.flush())
            .map_err(|e| CliError::Numeric(format!("stdout: {e}")));
    };
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Validation(format!("output path {} has no file name", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let io = |e: std::io::Error| CliError::Numeric(format!("writing {}: {e}", path.display()));
    std::fs::write(&tmp, bytes).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        io(e)
    })
}
