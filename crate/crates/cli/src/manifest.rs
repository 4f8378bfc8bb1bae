//! Run manifests: every command writes `manifest.json` next to its outputs,
//! digesting the exact inputs consumed and files produced.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use szclassify_core::error::{Error, Result};

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    /// Wall-clock timestamp; the only non-reproducible field in any output.
    pub created_at: String,
    pub command_line: Vec<String>,
    pub seed: Option<u64>,
    pub resolved_config: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

pub fn digest_file(path: &Path, label: &str) -> Result<FileDigest> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(FileDigest {
        path: label.to_string(),
        sha256: hex(&Sha256::digest(&bytes)),
    })
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `manifest.json` into `out_dir`, digesting inputs and outputs.
pub fn write_manifest(
    out_dir: &Path,
    seed: Option<u64>,
    resolved_config: serde_json::Value,
    inputs: &[PathBuf],
    outputs: &[PathBuf],
) -> Result<PathBuf> {
    let manifest = RunManifest {
        tool: "szclassify",
        version: env!("CARGO_PKG_VERSION"),
        created_at: chrono::Utc::now().to_rfc3339(),
        command_line: std::env::args().collect(),
        seed,
        resolved_config,
        inputs: inputs
            .iter()
            .map(|p| digest_file(p, &p.display().to_string()))
            .collect::<Result<_>>()?,
        outputs: outputs
            .iter()
            .map(|p| {
                // Outputs are recorded by name relative to the run directory.
                let label = p.strip_prefix(out_dir).unwrap_or(p).display().to_string();
                digest_file(p, &label)
            })
            .collect::<Result<_>>()?,
    };
    let path = out_dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, text).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}
