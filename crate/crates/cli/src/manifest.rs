use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::error::CliResult;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Written to the output directory before a run starts.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub output_dir: PathBuf,
    pub tool_version: String,
    pub started_at_unix: f64,
    /// Set when the arguments could not be resolved into a config.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str, out: &Path, seed: Option<u64>) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            config: Value::Null,
            seed,
            output_dir: out.to_path_buf(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started_at_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs_f64())
                .unwrap_or(0.0),
            error: None,
        }
    }

    pub fn write(&self) -> CliResult<()> {
        fs::create_dir_all(&self.output_dir)?;
        fs::write(
            self.output_dir.join(MANIFEST_FILE),
            serde_json::to_string_pretty(self)?,
        )?;
        Ok(())
    }
}
