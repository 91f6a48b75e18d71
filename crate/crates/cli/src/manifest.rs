//! Run manifest: config echo, versions, input digest, output inventory
//! with digests, timing, and summary metrics. Every listed file exists at
//! write time and carries its own digest, so a run can be re-checked
//! against the manifest later. Timing is the one intentionally
//! non-reproducible field; all other outputs are byte-identical across
//! runs with the same inputs and seed.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Serialize)]
pub struct Manifest {
    pub command: String,
    pub config: Value,
    pub versions: BTreeMap<String, String>,
    pub input_digest: Option<String>,
    pub outputs: Vec<OutputFile>,
    pub timing_seconds: f64,
    pub summary: Value,
}

#[derive(Serialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    format!("{:x}", h.finalize())
}

pub struct RunWriter {
    out_dir: PathBuf,
    outputs: Vec<OutputFile>,
}

impl RunWriter {
    pub fn new(out_dir: &Path) -> anyhow::Result<Self> {
        std::fs::create_dir_all(out_dir)?;
        Ok(RunWriter {
            out_dir: out_dir.to_path_buf(),
            outputs: Vec::new(),
        })
    }

    /// Writes a file under the output directory and records its digest.
    pub fn write(&mut self, name: &str, contents: &str) -> anyhow::Result<PathBuf> {
        let path = self.out_dir.join(name);
        std::fs::write(&path, contents)?;
        self.outputs.push(OutputFile {
            file: name.to_string(),
            sha256: sha256_hex(contents.as_bytes()),
        });
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn finish(
        self,
        command: &str,
        config: Value,
        input_digest: Option<String>,
        summary: Value,
        started: std::time::Instant,
    ) -> anyhow::Result<PathBuf> {
        let mut versions = BTreeMap::new();
        versions.insert("nninterp".to_string(), env!("CARGO_PKG_VERSION").to_string());
        let manifest = Manifest {
            command: command.to_string(),
            config,
            versions,
            input_digest,
            outputs: self.outputs,
            timing_seconds: started.elapsed().as_secs_f64(),
            summary,
        };
        let path = self.out_dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}
