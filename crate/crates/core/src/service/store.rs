//! Namespaced key-value store with a file-backed append-only log.
//!
//! All mutations funnel through a single writer (the write lock); readers
//! see consistent snapshots. Opening a store replays its log, so restarts
//! recover the full state.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::ServiceError;

#[derive(Debug, Serialize, Deserialize)]
struct LogRecord<'a> {
    op: &'a str,
    ns: &'a str,
    key: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<serde_json::Value>,
}

#[derive(Debug)]
pub struct Store {
    map: RwLock<BTreeMap<(String, String), serde_json::Value>>,
    log: Mutex<Option<File>>,
    path: Option<PathBuf>,
}

impl Store {
    /// Volatile store for tests and dry runs.
    pub fn in_memory() -> Self {
        Self {
            map: RwLock::new(BTreeMap::new()),
            log: Mutex::new(None),
            path: None,
        }
    }

    /// Opens (or creates) a file-backed store, replaying the log.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, ServiceError> {
        let path = path.as_ref().to_path_buf();
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let mut map = BTreeMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path)?);
            for (i, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let record: serde_json::Value =
                    serde_json::from_str(&line).map_err(|e| ServiceError::Corrupt {
                        line: i + 1,
                        detail: e.to_string(),
                    })?;
                let op = record["op"].as_str().unwrap_or_default().to_string();
                let ns = record["ns"].as_str().unwrap_or_default().to_string();
                let key = record["key"].as_str().unwrap_or_default().to_string();
                match op.as_str() {
                    "put" => {
                        map.insert((ns, key), record["value"].clone());
                    }
                    "del" => {
                        map.remove(&(ns, key));
                    }
                    other => {
                        return Err(ServiceError::Corrupt {
                            line: i + 1,
                            detail: format!("unknown op {other:?}"),
                        });
                    }
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Self {
            map: RwLock::new(map),
            log: Mutex::new(Some(file)),
            path: Some(path),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get<T: DeserializeOwned>(&self, ns: &str, key: &str) -> Option<T> {
        let map = self.map.read().expect("store lock");
        map.get(&(ns.to_string(), key.to_string()))
            .and_then(|v| serde_json::from_value(v.clone()).ok())
    }

    /// All entries of a namespace, sorted by key.
    pub fn scan<T: DeserializeOwned>(&self, ns: &str) -> Vec<(String, T)> {
        let map = self.map.read().expect("store lock");
        map.range((ns.to_string(), String::new())..)
            .take_while(|((n, _), _)| n == ns)
            .filter_map(|((_, k), v)| {
                serde_json::from_value(v.clone()).ok().map(|t| (k.clone(), t))
            })
            .collect()
    }

    pub fn put<T: Serialize>(&self, ns: &str, key: &str, value: &T) -> Result<(), ServiceError> {
        self.transact(|txn| {
            txn.put(ns, key, value);
            Ok(())
        })
    }

    pub fn delete(&self, ns: &str, key: &str) -> Result<(), ServiceError> {
        self.transact(|txn| {
            txn.delete(ns, key);
            Ok(())
        })
    }

    /// Runs `f` atomically under the single writer: every read inside sees
    /// the latest state, and all writes land in the log together.
    pub fn transact<R>(
        &self,
        f: impl FnOnce(&mut StoreTxn<'_>) -> Result<R, ServiceError>,
    ) -> Result<R, ServiceError> {
        let mut map = self.map.write().expect("store lock");
        let mut txn = StoreTxn {
            map: &mut map,
            log_lines: Vec::new(),
        };
        let result = f(&mut txn)?;
        let lines = txn.log_lines;
        let mut log = self.log.lock().expect("log lock");
        if let Some(file) = log.as_mut() {
            for line in &lines {
                writeln!(file, "{line}")?;
            }
            file.flush()?;
        }
        Ok(result)
    }
}

/// Write-lock view of the store used inside [`Store::transact`].
pub struct StoreTxn<'a> {
    map: &'a mut BTreeMap<(String, String), serde_json::Value>,
    log_lines: Vec<String>,
}

impl StoreTxn<'_> {
    pub fn get<T: DeserializeOwned>(&self, ns: &str, key: &str) -> Option<T> {
        self.map
            .get(&(ns.to_string(), key.to_string()))
            .and_then(|v| serde_json::from_value(v.clone()).ok())
    }

    pub fn contains(&self, ns: &str, key: &str) -> bool {
        self.map.contains_key(&(ns.to_string(), key.to_string()))
    }

    pub fn put<T: Serialize>(&mut self, ns: &str, key: &str, value: &T) {
        let value = serde_json::to_value(value).expect("serializable value");
        self.log_lines.push(
            serde_json::to_string(&LogRecord {
                op: "put",
                ns,
                key,
                value: Some(value.clone()),
            })
            .expect("log record"),
        );
        self.map.insert((ns.to_string(), key.to_string()), value);
    }

    pub fn delete(&mut self, ns: &str, key: &str) {
        self.log_lines.push(
            serde_json::to_string(&LogRecord {
                op: "del",
                ns,
                key,
                value: None,
            })
            .expect("log record"),
        );
        self.map.remove(&(ns.to_string(), key.to_string()));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn put_get_scan() {
        let store = Store::in_memory();
        store.put("jobs", "j2", &"two").unwrap();
        store.put("jobs", "j1", &"one").unwrap();
        store.put("other", "x", &42u64).unwrap();
        assert_eq!(store.get::<String>("jobs", "j1"), Some("one".into()));
        assert_eq!(store.get::<String>("jobs", "missing"), None);
        let jobs: Vec<(String, String)> = store.scan("jobs");
        assert_eq!(jobs.len(), 2);
        assert_eq!(jobs[0].0, "j1");
    }

    #[test]
    fn restart_recovers_state() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("store.jsonl");
        {
            let store = Store::open(&path).unwrap();
            store.put("jobs", "j1", &"one").unwrap();
            store.put("jobs", "j2", &"two").unwrap();
            store.delete("jobs", "j1").unwrap();
            store.put("tally", "f|es", &7u64).unwrap();
        }
        let reopened = Store::open(&path).unwrap();
        assert_eq!(reopened.get::<String>("jobs", "j1"), None);
        assert_eq!(reopened.get::<String>("jobs", "j2"), Some("two".into()));
        assert_eq!(reopened.get::<u64>("tally", "f|es"), Some(7));
    }

    #[test]
    fn corrupt_log_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("store.jsonl");
        std::fs::write(&path, "{\"op\":\"put\",\"ns\":\"a\",\"key\":\"k\",\"value\":1}\nnot json\n").unwrap();
        let err = Store::open(&path).unwrap_err();
        assert!(matches!(err, ServiceError::Corrupt { line: 2, .. }));
    }

    #[test]
    fn transact_is_atomic_read_modify_write() {
        let store = Store::in_memory();
        store.put("tally", "k", &0u64).unwrap();
        std::thread::scope(|scope| {
            for _ in 0..8 {
                scope.spawn(|| {
                    for _ in 0..100 {
                        store
                            .transact(|txn| {
                                let n: u64 = txn.get("tally", "k").unwrap_or(0);
                                txn.put("tally", "k", &(n + 1));
                                Ok(())
                            })
                            .unwrap();
                    }
                });
            }
        });
        assert_eq!(store.get::<u64>("tally", "k"), Some(800));
    }

    #[test]
    fn namespaces_do_not_collide() {
        let store = Store::in_memory();
        store.put("a", "k", &1u64).unwrap();
        store.put("b", "k", &2u64).unwrap();
        assert_eq!(store.get::<u64>("a", "k"), Some(1));
        assert_eq!(store.get::<u64>("b", "k"), Some(2));
        let scanned: Vec<(String, u64)> = store.scan("a");
        assert_eq!(scanned.len(), 1);
    }
}
