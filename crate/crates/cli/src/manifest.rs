//! Run manifest: the resolved configuration, input checksums, and produced
//! files. Two runs over the same inputs write identical manifests, and the
//! manifest alone carries everything needed to repeat the run.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::pipeline::CliError;

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'a str,
    config: &'a RunConfig,
    inputs: BTreeMap<String, String>,
    outputs: &'a [String],
}

fn sha256_of(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Validation(format!("cannot checksum {}: {e}", path.display())))?;
    let digest = Sha256::digest(&bytes);
    Ok(format!(
        "sha256:{}",
        digest
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect::<String>()
    ))
}

/// Write `manifest.json` into the output directory.
pub fn write_manifest(
    subcommand: &str,
    config: &RunConfig,
    outputs: &[String],
) -> Result<(), CliError> {
    let mut inputs = BTreeMap::new();
    for path in [&config.input, &config.predictions, &config.embeddings]
        .into_iter()
        .flatten()
    {
        inputs.insert(path.display().to_string(), sha256_of(path)?);
    }
    let manifest = Manifest {
        tool: "fiqs",
        version: env!("CARGO_PKG_VERSION"),
        subcommand,
        config,
        inputs,
        outputs,
    };
    let path = config.out.join("manifest.json");
    let mut payload = serde_json::to_vec_pretty(&manifest)
        .map_err(|e| CliError::Validation(format!("manifest: {e}")))?;
    payload.push(b'\n');
    fs::write(&path, payload)
        .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))
}
