//! Provenance record written next to every set of output files. The
//! manifest names each artifact with its SHA-256 digest and byte count, so
//! a rerun can be checked for bit-identical results without keeping the
//! original data around. Data files never embed timestamps or host state;
//! only the manifest carries the creation time.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::sim::EnsembleSpec;

pub const MANIFEST_NAME: &str = "run_manifest.json";

/// RNG identifier recorded for reproducibility audits.
pub const RNG_ALGORITHM: &str = "chacha8, seeded from master_seed, one stream per run index";

#[derive(Debug, Clone, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub argv: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<ModelParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSpec>,
    pub rng_algorithm: String,
    pub created_utc: String,
    pub outputs: Vec<OutputFile>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes output files into a directory and accumulates the manifest.
/// `finish` must be called last so the manifest covers every artifact.
#[derive(Debug)]
pub struct Emitter {
    dir: PathBuf,
    manifest: RunManifest,
}

impl Emitter {
    pub fn new(
        dir: &Path,
        command: &str,
        argv: Vec<String>,
        params: Option<&ModelParams>,
        ensemble: Option<&EnsembleSpec>,
    ) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| {
            Error::Config(format!("out_dir {}: {e}", dir.display()))
        })?;
        Ok(Emitter {
            dir: dir.to_path_buf(),
            manifest: RunManifest {
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                command: command.to_string(),
                argv,
                params: params.cloned(),
                ensemble: ensemble.cloned(),
                rng_algorithm: RNG_ALGORITHM.to_string(),
                created_utc: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
                outputs: Vec::new(),
            },
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn emit(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
        self.manifest.outputs.push(OutputFile {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(path)
    }

    /// Writes the manifest itself and returns its path.
    pub fn finish(self) -> Result<PathBuf> {
        let path = self.dir.join(MANIFEST_NAME);
        let body = serde_json::to_string_pretty(&self.manifest)
            .map_err(|e| Error::Invariant(format!("manifest serialization failed: {e}")))?;
        std::fs::write(&path, body)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}
