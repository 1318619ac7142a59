use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub role: String,
    pub path: String,
    /// SHA-256 of the canonical serialization, not of the file bytes.
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub inputs: Vec<InputDigest>,
    pub seeds: Vec<u64>,
    /// Seconds; `null` unless `--timing` was given so reports stay
    /// reproducible.
    pub wall_clock_seconds: Option<f64>,
    pub pass: bool,
    pub checks: BTreeMap<String, bool>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            inputs: Vec::new(),
            seeds: Vec::new(),
            wall_clock_seconds: None,
            pass: true,
            checks: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, role: &str, path: &Path, canonical: &str) {
        self.inputs.push(InputDigest {
            role: role.into(),
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(canonical.as_bytes())),
        });
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool) {
        self.pass &= pass;
        self.checks.insert(name.into(), pass);
    }
}

#[derive(Serialize)]
pub struct Report<'a, T: Serialize> {
    pub manifest: &'a RunManifest,
    pub report: &'a T,
}
