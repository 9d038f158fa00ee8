use serde::Serialize;

use super::Command;

/// Reproducibility record written next to every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub library_version: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub wall_time: f64,
    pub error: Option<String>,
}

impl RunManifest {
    pub fn new(command: &Command) -> Self {
        let name = match command {
            Command::Sphere(_) => "sphere",
            Command::Push(_) => "push",
            Command::Check(_) => "check",
            Command::Fit(_) => "fit",
            Command::Gradcheck(_) => "gradcheck",
        };
        Self {
            schema_version: super::REPORT_SCHEMA_VERSION,
            command: name.into(),
            config: serde_json::Value::Null,
            seed: None,
            library_version: env!("CARGO_PKG_VERSION").into(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            wall_time: 0.0,
            error: None,
        }
    }
}
