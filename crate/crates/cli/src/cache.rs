//! Content-addressed result cache and the CSV run ledger.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use sha2::{Digest, Sha256};

pub const LEDGER_FILE: &str = "ledger.csv";

pub struct Cache {
    root: PathBuf,
}

impl Cache {
    pub fn new(root: &Path) -> Self {
        Cache {
            root: root.to_path_buf(),
        }
    }

    /// Hex SHA-256 of the normalized request.
    pub fn key(request: &serde_json::Value) -> String {
        let bytes = serde_json::to_vec(request).expect("request serializes");
        hex::encode(Sha256::digest(bytes))
    }

    fn result_path(&self, key: &str) -> PathBuf {
        self.root.join("results").join(format!("{key}.json"))
    }

    pub fn load(&self, key: &str) -> Option<String> {
        fs::read_to_string(self.result_path(key)).ok()
    }

    pub fn store(&self, key: &str, body: &str) -> anyhow::Result<()> {
        write_atomic(&self.result_path(key), body.as_bytes())
    }

    /// Appends one row, writing the whole ledger to a temporary file then renaming it.
    pub fn append_ledger(&self, header: &str, row: &str) -> anyhow::Result<()> {
        let path = self.root.join(LEDGER_FILE);
        let mut body = fs::read_to_string(&path).unwrap_or_default();
        if body.is_empty() {
            body.push_str(header);
            body.push('\n');
        }
        body.push_str(row);
        body.push('\n');
        write_atomic(&path, body.as_bytes())
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = path.parent().expect("cache paths have a parent");
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("entry"),
        std::process::id()
    ));
    let mut f = fs::File::create(&tmp).with_context(|| format!("writing {}", tmp.display()))?;
    f.write_all(bytes)?;
    f.sync_all()?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn key_depends_on_content() {
        let a = Cache::key(&json!({"cmd": "verify", "seed": 1}));
        assert_eq!(a.len(), 64);
        assert_eq!(a, Cache::key(&json!({"seed": 1, "cmd": "verify"})));
        assert_ne!(a, Cache::key(&json!({"cmd": "verify", "seed": 2})));
    }

    #[test]
    fn store_load_and_ledger() {
        let dir = std::env::temp_dir().join(format!("deltasum-cache-{}", std::process::id()));
        let cache = Cache::new(&dir);
        assert!(cache.load("k").is_none());
        cache.store("k", "{}").unwrap();
        assert_eq!(cache.load("k").as_deref(), Some("{}"));
        cache.append_ledger("a,b", "1,2").unwrap();
        cache.append_ledger("a,b", "3,4").unwrap();
        let ledger = fs::read_to_string(dir.join(LEDGER_FILE)).unwrap();
        assert_eq!(ledger, "a,b\n1,2\n3,4\n");
        fs::remove_dir_all(dir).unwrap();
    }
}
