//! Run metadata: scenario identity, engine version, and timestamp.
//!
//! The timestamp goes to the diagnostic stream only; result files stay
//! byte-identical across repeated runs.

use sha2::{Digest, Sha256};
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub scenario_name: String,
    /// Hex SHA-256 of the scenario document text, recomputable at any time.
    pub scenario_sha256: String,
    pub engine_version: String,
    pub timestamp_unix: u64,
}

impl RunArtifacts {
    pub fn new(scenario_name: &str, scenario_text: &str) -> Self {
        Self {
            scenario_name: scenario_name.to_string(),
            scenario_sha256: content_hash(scenario_text),
            engine_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    /// One line for the error stream.
    pub fn diagnostic_line(&self) -> String {
        format!(
            "scenario {:?} sha256:{} engine:{} ts:{}",
            self.scenario_name, self.scenario_sha256, self.engine_version, self.timestamp_unix
        )
    }
}

pub fn content_hash(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|byte| format!("{byte:02x}")).collect()
}
