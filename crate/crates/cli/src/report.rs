//! Report envelope: every JSON report names the tool version, the merged
//! config and its hash, and a digest of each input, so results can be tied
//! back to exactly what produced them.

use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Effective;
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

pub fn tool_info() -> ToolInfo {
    ToolInfo {
        name: "snipinfer",
        version: env!("CARGO_PKG_VERSION"),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct Envelope<T: Serialize> {
    pub tool: ToolInfo,
    pub config: Effective,
    pub config_hash: String,
    pub inputs: Vec<InputDigest>,
    pub report: T,
}

/// Digest a file, or a directory as the ordered digests of its files.
pub fn digest_path(path: &Path) -> Result<InputDigest, CliError> {
    let mut hasher = Sha256::new();
    if path.is_dir() {
        let mut files: Vec<_> = walk_files(path)?;
        files.sort();
        for file in files {
            let relative = file.strip_prefix(path).unwrap_or(&file);
            hasher.update(relative.to_string_lossy().as_bytes());
            hasher.update([0]);
            hasher.update(fs::read(&file)?);
            hasher.update([0]);
        }
    } else {
        hasher.update(fs::read(path)?);
    }
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: hex::encode(hasher.finalize()),
    })
}

fn walk_files(dir: &Path) -> Result<Vec<std::path::PathBuf>, CliError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        let path = entry.path();
        if path.is_dir() {
            out.extend(walk_files(&path)?);
        } else {
            out.push(path);
        }
    }
    Ok(out)
}

/// Wrap a payload and write it as pretty JSON.
pub fn write_report<T: Serialize>(
    out: &Path,
    config: &Effective,
    inputs: &[&Path],
    report: T,
) -> Result<(), CliError> {
    let mut digests = Vec::with_capacity(inputs.len());
    for input in inputs {
        digests.push(digest_path(input)?);
    }
    let envelope = Envelope {
        tool: tool_info(),
        config: config.clone(),
        config_hash: config.hash(),
        inputs: digests,
        report,
    };
    let text = serde_json::to_string_pretty(&envelope)?;
    fs::write(out, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::FileConfig;

    #[test]
    fn directory_digest_is_order_independent_and_content_sensitive() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("b.java"), "class B {}").unwrap();
        fs::write(dir.path().join("a.java"), "class A {}").unwrap();
        let first = digest_path(dir.path()).unwrap();
        let again = digest_path(dir.path()).unwrap();
        assert_eq!(first.sha256, again.sha256);

        fs::write(dir.path().join("a.java"), "class A { int x; }").unwrap();
        let changed = digest_path(dir.path()).unwrap();
        assert_ne!(first.sha256, changed.sha256);
    }

    #[test]
    fn envelope_carries_version_config_and_digests() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("input.json");
        fs::write(&input, "[]").unwrap();
        let out = dir.path().join("report.json");
        let config = Effective::resolve(
            &FileConfig::default(),
            Some(3),
            None,
            None,
            None,
            None,
            None,
        );
        write_report(&out, &config, &[&input], serde_json::json!({"ok": true})).unwrap();

        let value: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(value["tool"]["name"], "snipinfer");
        assert_eq!(value["tool"]["version"], env!("CARGO_PKG_VERSION"));
        assert_eq!(value["config"]["seed"], 3);
        assert_eq!(value["config_hash"].as_str().unwrap().len(), 16);
        assert_eq!(value["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
        assert_eq!(value["report"]["ok"], true);
    }
}
