//! Run manifests: a record of how each artifact was produced, sufficient to
//! rerun the command and confirm the outputs did not change.

use std::path::{Path, PathBuf};

use polyinv_core::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OutputRecord {
    pub path: PathBuf,
    /// SHA-256 of the file with wall-clock columns removed.
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub flags: serde_json::Value,
    pub seed: Option<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<OutputRecord>,
    pub tool_version: String,
    pub wall_ms: f64,
}

impl RunManifest {
    pub fn path_for(out: &Path) -> PathBuf {
        let mut name = out.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Digest of an output file. CSV columns named `ms` hold wall-clock times and
/// are dropped first, so reruns hash identically.
pub fn output_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    let is_csv = path.extension().is_some_and(|e| e == "csv");
    let content = if is_csv {
        let text = String::from_utf8(bytes).map_err(|_| Error::Validation(format!("{} is not UTF-8", path.display())))?;
        strip_timing_column(&text).into_bytes()
    } else {
        bytes
    };
    Ok(Sha256::digest(&content).iter().map(|b| format!("{b:02x}")).collect())
}

fn strip_timing_column(text: &str) -> String {
    let mut lines = text.lines();
    let Some(header) = lines.next() else {
        return String::new();
    };
    let Some(col) = header.split(',').position(|h| h == "ms") else {
        return text.to_string();
    };
    std::iter::once(header)
        .chain(lines)
        .map(|line| {
            line.split(',')
                .enumerate()
                .filter(|&(i, _)| i != col)
                .map(|(_, f)| f)
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}
