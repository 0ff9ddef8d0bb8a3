use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

/// Flags given on the command line win over the config file. Keys of the
/// file use the long flag names.
pub fn merge<T: Serialize + DeserializeOwned>(cli: &T, file: &Map<String, Value>) -> Result<T, CliError> {
    let mut merged = file.clone();
    if let Value::Object(flags) = serde_json::to_value(cli).map_err(|e| CliError::Numeric(e.to_string()))? {
        for (k, v) in flags {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Validation(format!("config: {e}")))
}

/// Field names of a flag struct, taken from its serialized default.
pub fn keys<T: Serialize + Default>() -> Vec<String> {
    match serde_json::to_value(T::default()) {
        Ok(Value::Object(m)) => m.keys().cloned().collect(),
        _ => Vec::new(),
    }
}

pub fn load(path: Option<&PathBuf>, allowed: &[String]) -> Result<Map<String, Value>, CliError> {
    let Some(path) = path else {
        return Ok(Map::new());
    };
    let text = read(path)?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))?;
    let Value::Object(map) = value else {
        return Err(CliError::Validation(format!("config {} must be a JSON object", path.display())));
    };
    if let Some(bad) = map.keys().find(|k| !allowed.contains(k)) {
        return Err(CliError::Validation(format!("config {}: unknown key `{bad}`", path.display())));
    }
    Ok(map)
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))
}
