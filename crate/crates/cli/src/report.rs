//! Canonical JSON artifacts: sorted keys, pretty-printed, newline-terminated, hashed.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use hamlower_core::Error;

/// `serde_json::Value` keeps object keys in a `BTreeMap`, so a round trip sorts them.
pub fn canonical<S: Serialize>(x: &S) -> Result<String, Error> {
    let v = serde_json::to_value(x).map_err(|e| Error::Parse(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Files written by one command, keyed by name with their digests.
pub struct Artifacts {
    dir: PathBuf,
    pub files: BTreeMap<String, String>,
}

impl Artifacts {
    pub fn new(dir: &Path) -> Result<Self, Error> {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        Ok(Artifacts { dir: dir.to_path_buf(), files: BTreeMap::new() })
    }

    pub fn json<S: Serialize>(&mut self, name: &str, x: &S) -> Result<String, Error> {
        let text = canonical(x)?;
        self.raw(name, text.as_bytes())
    }

    pub fn raw(&mut self, name: &str, bytes: &[u8]) -> Result<String, Error> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| io_error(&path, e))?;
        let digest = sha256_hex(bytes);
        self.files.insert(name.to_string(), digest.clone());
        Ok(digest)
    }

    /// The report itself lists every other artifact; it is written last and not self-hashed.
    pub fn finish(mut self, command: &str, params: Value, body: Value, status: &str) -> Result<(), Error> {
        let files = serde_json::to_value(&self.files).expect("string map");
        let report = serde_json::json!({
            "command": command,
            "params": params,
            "result": body,
            "status": status,
            "artifacts": files,
        });
        self.raw(&format!("{command}.report.json"), canonical(&report)?.as_bytes())?;
        Ok(())
    }
}

pub fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Parse(format!("{}: {e}", path.display()))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}
