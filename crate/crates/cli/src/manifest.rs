//! Machine-readable run manifest: enough to re-execute the run byte for
//! byte (command, full config, config hash, seed, input digests, versions).

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::{CliError, CliResult};

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn write_manifest(
    out_dir: &Path,
    command: &str,
    config: serde_json::Value,
    seed: u64,
    inputs: &[&PathBuf],
) -> CliResult {
    let mut input_entries = Vec::new();
    for path in inputs {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        input_entries.push(serde_json::json!({
            "path": path.display().to_string(),
            "sha256": sha256_hex(&bytes),
        }));
    }
    // serde_json maps serialize with sorted keys, so this hash is canonical
    let config_hash = sha256_hex(config.to_string().as_bytes());
    let manifest = serde_json::json!({
        "command": command,
        "config": config,
        "config_hash": config_hash,
        "seed": seed,
        "inputs": input_entries,
        "versions": {
            "assetnet-cli": env!("CARGO_PKG_VERSION"),
        },
    });
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(
        out_dir.join("manifest.json"),
        format!("{}\n", serde_json::to_string_pretty(&manifest).unwrap()),
    )?;
    Ok(())
}
