//! Append-only JSON-lines response cache keyed by request hash.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub request_hash: String,
    pub model: String,
    pub temperature: f64,
    pub response_text: String,
    pub latency_ms: u64,
}

/// SHA-256 over the JSON encoding of `[model, temperature, text]`.
pub fn request_hash(model: &str, temperature: f64, text: &str) -> String {
    let canonical = serde_json::to_vec(&(model, temperature, text)).expect("plain tuple serializes");
    let digest = Sha256::digest(&canonical);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub struct ResponseCache {
    path: Option<PathBuf>,
    entries: RwLock<HashMap<String, CacheEntry>>,
    writer: Mutex<Option<File>>,
}

impl ResponseCache {
    pub fn in_memory() -> Self {
        ResponseCache {
            path: None,
            entries: RwLock::new(HashMap::new()),
            writer: Mutex::new(None),
        }
    }

    /// Loads existing entries from `path` (created if absent). A torn final
    /// line from an interrupted run is skipped.
    pub fn open(path: &Path) -> io::Result<Self> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        let mut entries = HashMap::new();
        if path.exists() {
            for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<CacheEntry>(&line) {
                    Ok(e) => {
                        entries.entry(e.request_hash.clone()).or_insert(e);
                    }
                    Err(err) => log::warn!("{}:{}: skipping unreadable cache line: {err}", path.display(), i + 1),
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(ResponseCache {
            path: Some(path.to_path_buf()),
            entries: RwLock::new(entries),
            writer: Mutex::new(Some(file)),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, hash: &str) -> Option<CacheEntry> {
        self.entries.read().expect("cache lock").get(hash).cloned()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Stores `entry` unless its hash is already present. Returns whether a
    /// new entry was written.
    pub fn insert(&self, entry: CacheEntry) -> io::Result<bool> {
        let mut writer = self.writer.lock().expect("cache writer lock");
        if self.entries.read().expect("cache lock").contains_key(&entry.request_hash) {
            return Ok(false);
        }
        if let Some(file) = writer.as_mut() {
            let mut line = serde_json::to_vec(&entry).map_err(io::Error::other)?;
            line.push(b'\n');
            file.write_all(&line)?;
            file.flush()?;
        }
        self.entries
            .write()
            .expect("cache lock")
            .insert(entry.request_hash.clone(), entry);
        Ok(true)
    }

    pub fn flush(&self) -> io::Result<()> {
        match self.writer.lock().expect("cache writer lock").as_mut() {
            Some(f) => f.sync_data(),
            None => Ok(()),
        }
    }
}
