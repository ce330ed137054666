//! Optional JSON config file: a flat object whose keys are the long flag
//! names of the invoked subcommand. Explicit command-line flags win over
//! config values, which win over built-in defaults.

use std::path::Path;

use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Default, Clone)]
pub struct Config {
    values: Map<String, Value>,
}

pub fn load(path: Option<&Path>) -> Result<Config, CliError> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let values: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    match values {
        Value::Object(values) => Ok(Config { values }),
        _ => Err(CliError::Usage(format!(
            "{}: config must be a JSON object",
            path.display()
        ))),
    }
}

impl Config {
    pub fn f64(&self, key: &str) -> Option<f64> {
        self.values.get(key).and_then(Value::as_f64)
    }

    pub fn usize(&self, key: &str) -> Option<usize> {
        self.values
            .get(key)
            .and_then(Value::as_u64)
            .map(|v| v as usize)
    }

    pub fn u64(&self, key: &str) -> Option<u64> {
        self.values.get(key).and_then(Value::as_u64)
    }

    pub fn string(&self, key: &str) -> Option<String> {
        self.values
            .get(key)
            .and_then(Value::as_str)
            .map(str::to_string)
    }
}
