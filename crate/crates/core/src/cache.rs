//! Content-addressed on-disk cache for enumerations and relation systems.
//!
//! Entries live at `<root>/<version-hash>/<kind>/<skeleton>/<n>.json` and
//! carry a checksum of their payload; a checksum or key mismatch is
//! treated as a miss and the entry is regenerated. An unwritable cache
//! directory degrades to uncached computation with a single warning.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::diagram::Skeleton;

/// Bumped when the relation engine's output format or generation strategy
/// changes; stale cache trees are ignored via the version hash.
pub const ENGINE_REVISION: &str = "engine-1";

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug)]
pub struct Cache {
    root: Option<PathBuf>,
    version: String,
    hits: AtomicUsize,
    misses: AtomicUsize,
    warned: AtomicBool,
}

impl Cache {
    pub fn disabled() -> Cache {
        Cache::with_version(None, default_version())
    }

    pub fn at(root: impl AsRef<Path>) -> Cache {
        Cache::with_version(Some(root.as_ref().to_path_buf()), default_version())
    }

    /// Cache rooted at `root` with an explicit version string (exposed so
    /// version-bump behavior is testable).
    pub fn with_version(root: Option<PathBuf>, version: String) -> Cache {
        Cache {
            root,
            version,
            hits: AtomicUsize::new(0),
            misses: AtomicUsize::new(0),
            warned: AtomicBool::new(false),
        }
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> usize {
        self.misses.load(Ordering::Relaxed)
    }

    fn version_hash(&self) -> String {
        sha256_hex(self.version.as_bytes())[..16].to_string()
    }

    fn path(&self, kind: &str, skeleton: Skeleton, order: usize) -> Option<PathBuf> {
        let root = self.root.as_ref()?;
        Some(
            root.join(self.version_hash())
                .join(kind)
                .join(skeleton.to_string())
                .join(format!("{order}.json")),
        )
    }

    fn key_json(&self, kind: &str, skeleton: Skeleton, order: usize) -> Value {
        json!({
            "kind": kind,
            "skeleton": skeleton.to_string(),
            "order": order,
            "version": self.version,
        })
    }

    /// Fingerprint of a payload under this cache's addressing scheme.
    pub fn fingerprint(&self, kind: &str, skeleton: Skeleton, order: usize, payload: &Value) -> String {
        let body = serde_json::to_string(payload).expect("payload serializes");
        format!("{kind}/{skeleton}/{order}:{}", &sha256_hex(body.as_bytes())[..16])
    }

    /// Returns the stored payload if present, addressed correctly and
    /// checksum-clean; anything else is a miss.
    pub fn get(&self, kind: &str, skeleton: Skeleton, order: usize) -> Option<Value> {
        let path = self.path(kind, skeleton, order)?;
        let data = match std::fs::read(&path) {
            Ok(d) => d,
            Err(_) => {
                self.misses.fetch_add(1, Ordering::Relaxed);
                return None;
            }
        };
        let parsed: Value = match serde_json::from_slice(&data) {
            Ok(v) => v,
            Err(_) => {
                self.misses.fetch_add(1, Ordering::Relaxed);
                return None;
            }
        };
        let payload = parsed.get("payload")?.clone();
        let checksum = parsed.get("checksum").and_then(Value::as_str).unwrap_or_default();
        let expected = sha256_hex(serde_json::to_string(&payload).ok()?.as_bytes());
        let key_ok = parsed.get("key") == Some(&self.key_json(kind, skeleton, order));
        if checksum != expected || !key_ok {
            self.misses.fetch_add(1, Ordering::Relaxed);
            return None;
        }
        self.hits.fetch_add(1, Ordering::Relaxed);
        Some(payload)
    }

    /// Stores a payload; failures degrade to a warning on stderr.
    pub fn put(&self, kind: &str, skeleton: Skeleton, order: usize, payload: &Value) {
        let Some(path) = self.path(kind, skeleton, order) else { return };
        let body = serde_json::to_string(payload).expect("payload serializes");
        let entry = json!({
            "checksum": sha256_hex(body.as_bytes()),
            "key": self.key_json(kind, skeleton, order),
            "payload": payload,
        });
        let write = || -> std::io::Result<()> {
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(&path, serde_json::to_vec(&entry)?)
        };
        if let Err(e) = write() {
            if !self.warned.swap(true, Ordering::Relaxed) {
                eprintln!("warning: cache directory is unwritable ({e}); continuing uncached");
            }
        }
    }
}

fn default_version() -> String {
    format!("{}+{}", env!("CARGO_PKG_VERSION"), ENGINE_REVISION)
}
