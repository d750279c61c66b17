//! On-disk cache of command results, keyed by a SHA-256 of the command and
//! its full configuration.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;
use sha2::{Digest, Sha256};

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf() }
    }

    pub fn key(material: &Value) -> String {
        let bytes = serde_json::to_vec(material).expect("json");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn load(&self, key: &str) -> Option<Value> {
        let s = fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&s).ok()
    }

    pub fn store(&self, key: &str, v: &Value) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let tmp = self.dir.join(format!("{key}.tmp"));
        fs::write(&tmp, serde_json::to_vec_pretty(v).expect("json"))?;
        fs::rename(tmp, self.path(key))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn round_trip_and_key_stability() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(dir.path());
        let k = Cache::key(&json!({"a": 1, "b": "x"}));
        assert_eq!(k, Cache::key(&json!({"b": "x", "a": 1})));
        assert_ne!(k, Cache::key(&json!({"a": 2, "b": "x"})));
        assert!(c.load(&k).is_none());
        let v = json!({"value": "1.5e0"});
        c.store(&k, &v).unwrap();
        assert_eq!(c.load(&k).unwrap(), v);
    }
}
