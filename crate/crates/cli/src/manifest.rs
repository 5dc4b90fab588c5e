//! Run manifests: what was run, with which inputs, and what it wrote.

use std::path::{Path, PathBuf};

use serde::Serialize;
use wanderlab::ConstructionParams;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params: ConstructionParams,
    /// Textual seeds (points, probes) the run started from.
    pub seeds: Vec<String>,
    pub outputs: Vec<PathBuf>,
    pub tool_version: String,
    pub wall_time_ms: u128,
}

impl RunManifest {
    pub fn new(command: &str, params: &ConstructionParams) -> Self {
        RunManifest {
            command: command.to_string(),
            params: params.clone(),
            seeds: Vec::new(),
            outputs: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_ms: 0,
        }
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, json + "\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serializes_every_field() {
        let p = ConstructionParams::new(60.0, 0.01, 20, 256, 64).unwrap();
        let mut m = RunManifest::new("verify", &p);
        m.seeds.push("xi:2".into());
        m.outputs.push("report.json".into());
        let v: serde_json::Value = serde_json::to_value(&m).unwrap();
        for key in ["command", "params", "seeds", "outputs", "tool_version", "wall_time_ms"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["params"]["gamma"], 60.0);
    }
}
