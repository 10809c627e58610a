//! `manifest.json`: one entry per subcommand run into an output directory,
//! with versions, the effective configuration and SHA-256 digests.

use std::fs::File;
use std::io::{self, Read};
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const FILE_NAME: &str = "manifest.json";

pub fn sha256_file(path: &Path) -> io::Result<String> {
    let mut file = File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

fn digests(paths: &[PathBuf]) -> io::Result<Map<String, Value>> {
    let mut map = Map::new();
    for p in paths {
        map.insert(p.display().to_string(), Value::String(sha256_file(p)?));
    }
    Ok(map)
}

/// Record a run in `<dir>/manifest.json`, replacing an earlier entry for the
/// same command and keeping the others.
pub fn record_run(dir: &Path, command: &str, config: Value, inputs: &[PathBuf], outputs: &[PathBuf]) -> io::Result<PathBuf> {
    let path = dir.join(FILE_NAME);
    let mut runs = std::fs::read_to_string(&path)
        .ok()
        .and_then(|text| serde_json::from_str::<Value>(&text).ok())
        .and_then(|v| v.get("runs").and_then(Value::as_object).cloned())
        .unwrap_or_default();
    let entry = json!({
        "timestamp": chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        "config": config,
        "inputs": digests(inputs)?,
        "outputs": digests(outputs)?,
    });
    runs.insert(command.to_owned(), entry);
    let manifest = json!({
        "tool": "kgforge",
        "version": env!("CARGO_PKG_VERSION"),
        "library_version": kgforge::VERSION,
        "runs": runs,
    });
    let mut text = serde_json::to_string_pretty(&manifest).map_err(io::Error::other)?;
    text.push('\n');
    std::fs::write(&path, text)?;
    Ok(path)
}
