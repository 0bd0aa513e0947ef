//! Output manifest: every artifact with its content hash, plus the config
//! hash and tool version, so identical configs are checkable byte for byte.

use crate::error::Result;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize)]
pub struct ManifestFile {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub version: String,
    pub experiment: String,
    pub config_sha256: String,
    pub seed: u64,
    pub files: Vec<ManifestFile>,
}

pub fn sha256_hex(data: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(data);
    hex_string(&hasher.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Collects the artifact directory and writes `manifest.json`.
pub fn write_manifest(
    out_dir: &Path,
    experiment: &str,
    config_text: &str,
    seed: u64,
    files: &[PathBuf],
) -> Result<()> {
    let mut entries = Vec::new();
    for f in files {
        let data = fs::read(f)?;
        entries.push(ManifestFile {
            name: f
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default(),
            bytes: data.len() as u64,
            sha256: sha256_hex(&data),
        });
    }
    let manifest = Manifest {
        version: crate::VERSION.to_string(),
        experiment: experiment.to_string(),
        config_sha256: sha256_hex(config_text.as_bytes()),
        seed,
        files: entries,
    };
    let json = serde_json::to_string_pretty(&manifest)?;
    fs::write(out_dir.join("manifest.json"), json)?;
    Ok(())
}
