//! Persistent measure cache: an append-only JSON-lines file keyed by image
//! content hash and parameter fingerprint.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::codec::CODEC_VERSION;
use crate::error::{Error, Result};
use crate::measures::{MeasureConfig, MeasureVector};

/// Environment variable naming the cache directory.
pub const CACHE_DIR_ENV: &str = "ARTCOMPLEXITY_CACHE_DIR";
pub const CACHE_FILE_NAME: &str = "measures-cache.jsonl";

pub fn content_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of every measure parameter plus the codec version.
pub fn fingerprint(config: &MeasureConfig) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(config).expect("config serializes"));
    h.update(b"\0");
    h.update(CODEC_VERSION.as_bytes());
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureCacheEntry {
    pub content_hash: String,
    pub fingerprint: String,
    pub measures: MeasureVector,
    pub created_unix: u64,
}

type Key = (String, String);

pub struct MeasureCache {
    path: Option<PathBuf>,
    entries: RwLock<HashMap<Key, MeasureVector>>,
    writer: Mutex<Option<File>>,
    skipped_lines: usize,
    hits: AtomicUsize,
}

impl MeasureCache {
    /// A cache that lives only for this process.
    pub fn in_memory() -> Self {
        Self {
            path: None,
            entries: RwLock::new(HashMap::new()),
            writer: Mutex::new(None),
            skipped_lines: 0,
            hits: AtomicUsize::new(0),
        }
    }

    /// Opens (or creates) a cache file. Unreadable lines are skipped and
    /// their entries recomputed on demand.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let mut entries = HashMap::new();
        let mut skipped_lines = 0;
        if path.exists() {
            let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
            for line in BufReader::new(file).split(b'\n') {
                let line = line.map_err(|e| Error::io(&path, e))?;
                if line.iter().all(u8::is_ascii_whitespace) {
                    continue;
                }
                match serde_json::from_slice::<MeasureCacheEntry>(&line) {
                    Ok(e) => {
                        entries.insert((e.content_hash, e.fingerprint), e.measures);
                    }
                    Err(_) => skipped_lines += 1,
                }
            }
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        // a torn final line must not swallow the next append
        if std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0) > 0 && !ends_with_newline(&path)? {
            file.write_all(b"\n").map_err(|e| Error::io(&path, e))?;
        }
        Ok(Self {
            path: Some(path),
            entries: RwLock::new(entries),
            writer: Mutex::new(Some(file)),
            skipped_lines,
            hits: AtomicUsize::new(0),
        })
    }

    /// Cache file from the environment variable, if set.
    pub fn from_env() -> Result<Option<Self>> {
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(dir) if !dir.is_empty() => Ok(Some(Self::open(Path::new(&dir).join(CACHE_FILE_NAME))?)),
            _ => Ok(None),
        }
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Lines ignored at load time because they did not parse.
    pub fn skipped_lines(&self) -> usize {
        self.skipped_lines
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn get(&self, content_hash: &str, fingerprint: &str) -> Option<MeasureVector> {
        let found = self
            .entries
            .read()
            .expect("cache lock")
            .get(&(content_hash.to_string(), fingerprint.to_string()))
            .cloned();
        if found.is_some() {
            self.hits.fetch_add(1, Ordering::Relaxed);
        }
        found
    }

    pub fn insert(&self, content_hash: &str, fingerprint: &str, measures: &MeasureVector) -> Result<()> {
        let entry = MeasureCacheEntry {
            content_hash: content_hash.to_string(),
            fingerprint: fingerprint.to_string(),
            measures: measures.clone(),
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        };
        {
            let mut writer = self.writer.lock().expect("cache writer lock");
            if let (Some(file), Some(path)) = (writer.as_mut(), self.path.as_ref()) {
                let mut line = serde_json::to_vec(&entry).expect("entry serializes");
                line.push(b'\n');
                file.write_all(&line).map_err(|e| Error::io(path, e))?;
                file.flush().map_err(|e| Error::io(path, e))?;
            }
        }
        self.entries
            .write()
            .expect("cache lock")
            .insert((entry.content_hash, entry.fingerprint), entry.measures);
        Ok(())
    }
}

fn ends_with_newline(path: &Path) -> Result<bool> {
    use std::io::{Read, Seek, SeekFrom};
    let mut f = File::open(path).map_err(|e| Error::io(path, e))?;
    f.seek(SeekFrom::End(-1)).map_err(|e| Error::io(path, e))?;
    let mut b = [0u8; 1];
    f.read_exact(&mut b).map_err(|e| Error::io(path, e))?;
    Ok(b[0] == b'\n')
}
