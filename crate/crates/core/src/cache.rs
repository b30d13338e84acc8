//! Persistent class-number cache: an append-only JSON-lines file, one
//! entry per line, loaded as a snapshot at startup and appended to by a
//! single serialized writer.

use std::collections::{HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CACHE_SCHEMA_VERSION: u32 = 1;

/// One cached class number: {"v":1,"D":-212,"h":6,"method":"enumerate"}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub v: u32,
    #[serde(rename = "D")]
    pub d: i64,
    pub h: u64,
    pub method: String,
}

impl CacheEntry {
    fn validate(&self, line: usize) -> Result<()> {
        if self.v != CACHE_SCHEMA_VERSION {
            return Err(Error::Cache(format!(
                "line {line}: unsupported cache schema version {}",
                self.v
            )));
        }
        if self.d >= 0 || !matches!(self.d.rem_euclid(4), 0 | 1) {
            return Err(Error::Cache(format!(
                "line {line}: {} is not a negative discriminant",
                self.d
            )));
        }
        if self.h == 0 {
            return Err(Error::Cache(format!("line {line}: h must be positive")));
        }
        Ok(())
    }
}

/// Load every entry, reporting corrupt lines by number and rejecting
/// conflicting duplicates. A missing file is an empty cache.
pub fn load(path: &Path) -> Result<Vec<CacheEntry>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let mut entries = Vec::new();
    let mut seen: HashMap<i64, (u64, usize)> = HashMap::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: CacheEntry = serde_json::from_str(&line)
            .map_err(|e| Error::Cache(format!("line {line_no}: {e}")))?;
        entry.validate(line_no)?;
        if let Some(&(h, first_line)) = seen.get(&entry.d) {
            if h != entry.h {
                return Err(Error::Cache(format!(
                    "line {line_no}: D = {} has h = {} but line {first_line} recorded h = {h}",
                    entry.d, entry.h
                )));
            }
            continue;
        }
        seen.insert(entry.d, (entry.h, line_no));
        entries.push(entry);
    }
    Ok(entries)
}

/// The single serialized appender; deduplicates against already-known
/// discriminants so warm runs leave the file unchanged.
pub struct CacheWriter {
    path: PathBuf,
    inner: Mutex<WriterState>,
}

struct WriterState {
    file: File,
    known: HashSet<i64>,
}

impl CacheWriter {
    pub fn open(path: &Path, known: impl IntoIterator<Item = i64>) -> Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(CacheWriter {
            path: path.to_path_buf(),
            inner: Mutex::new(WriterState {
                file,
                known: known.into_iter().collect(),
            }),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, d: i64, h: u64, method: &str) -> Result<()> {
        let entry = CacheEntry {
            v: CACHE_SCHEMA_VERSION,
            d,
            h,
            method: method.to_string(),
        };
        let mut state = self.inner.lock().expect("cache writer lock poisoned");
        if !state.known.insert(d) {
            return Ok(());
        }
        let line = serde_json::to_string(&entry).expect("cache entry serializes");
        writeln!(state.file, "{line}")?;
        Ok(())
    }
}
