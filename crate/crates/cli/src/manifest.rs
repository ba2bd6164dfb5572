use std::fs;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use serde_json::{Map, Value};
use spinorbit::chsh::GENERATOR_ID;

use crate::error::CliError;

/// Provenance record written next to every output.
///
/// `argv` replays the run; replaying it reproduces CSV outputs byte for byte
/// under the same `tool_version`.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub argv: Vec<String>,
    pub seed: Option<u64>,
    pub generator: &'static str,
    pub tool_version: &'static str,
    pub timestamp: String,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl RunManifest {
    pub fn new(command: &str, parameters: Value, argv: Vec<String>, seed: Option<u64>) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters,
            argv,
            seed,
            generator: GENERATOR_ID,
            tool_version: env!("CARGO_PKG_VERSION"),
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
            extra: Map::new(),
        }
    }

    pub fn with(mut self, key: &str, value: Value) -> Self {
        self.extra.insert(key.to_string(), value);
        self
    }

    pub fn write_beside(&self, output: &Path) -> Result<PathBuf, CliError> {
        let path = manifest_path(output);
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(CliError::io(&path))?;
        Ok(path)
    }
}

/// `out.csv` → `out.csv.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Shortest text that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// `--name=value`, safe for values starting with `-`.
pub fn flag(name: &str, value: impl std::fmt::Display) -> String {
    format!("--{name}={value}")
}
