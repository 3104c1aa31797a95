//! File cache of loop extractions, keyed by a content hash of everything
//! that can change the result.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use relmon_core::periods::{ContinuationResult, EngineConfig, FactorSpec, LoopPath, SchemeSpec};

/// Bumped whenever the extraction algorithm changes what it returns.
const KEY_VERSION: u32 = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub loop_name: String,
    pub value: ContinuationResult,
}

#[derive(Serialize)]
struct KeyMaterial<'a> {
    version: u32,
    factors: &'a [FactorSpec],
    vertices: &'a [num_complex::Complex64],
    engine: &'a EngineConfig,
}

/// Hash of the scheme factors, loop vertices and every engine tolerance.
/// Names do not enter the key.
pub fn cache_key(scheme: &SchemeSpec, path: &LoopPath, engine: &EngineConfig) -> String {
    let material = KeyMaterial {
        version: KEY_VERSION,
        factors: &scheme.factors,
        vertices: &path.vertices,
        engine,
    };
    let bytes = serde_json::to_vec(&material).expect("key material serializes");
    hex::encode(Sha256::digest(&bytes))
}

pub struct Cache {
    dir: Option<PathBuf>,
    write_lock: Mutex<()>,
    hits: AtomicUsize,
    misses: AtomicUsize,
}

impl Cache {
    /// A cache rooted at `dir`, or a pass-through when `dir` is `None`.
    pub fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            std::fs::create_dir_all(d).with_context(|| format!("creating cache directory {}", d.display()))?;
        }
        Ok(Cache {
            dir,
            write_lock: Mutex::new(()),
            hits: AtomicUsize::new(0),
            misses: AtomicUsize::new(0),
        })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn stats(&self) -> (usize, usize) {
        (self.hits.load(Ordering::Relaxed), self.misses.load(Ordering::Relaxed))
    }

    fn entry_path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    pub fn get(&self, key: &str) -> Option<CacheEntry> {
        let text = std::fs::read_to_string(self.entry_path(key)?).ok()?;
        // unreadable or mismatched entries count as misses
        serde_json::from_str::<CacheEntry>(&text).ok().filter(|e| e.key == key)
    }

    fn put(&self, entry: &CacheEntry) -> Result<()> {
        let Some(path) = self.entry_path(&entry.key) else {
            return Ok(());
        };
        let text = serde_json::to_string_pretty(entry)?;
        let _guard = self.write_lock.lock().unwrap_or_else(|e| e.into_inner());
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
        std::fs::rename(&tmp, &path).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }

    /// Cached result for `path`, computing and storing it on a miss.
    pub fn get_or_compute<F>(&self, scheme: &SchemeSpec, path: &LoopPath, engine: &EngineConfig, compute: F) -> relmon_core::Result<ContinuationResult>
    where
        F: FnOnce() -> relmon_core::Result<ContinuationResult>,
    {
        let key = cache_key(scheme, path, engine);
        if let Some(hit) = self.get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(hit.value);
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let value = compute()?;
        let entry = CacheEntry {
            key,
            loop_name: path.name.clone(),
            value,
        };
        if let Err(e) = self.put(&entry) {
            eprintln!("warning: cache write failed: {e:#}");
        }
        Ok(entry.value)
    }
}
