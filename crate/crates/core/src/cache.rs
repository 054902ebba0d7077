//! Memoized characteristic polynomials with an optional on-disk store.
//!
//! On disk there is one file per Hecke index, `T_<p>.jsonl`, holding one JSON
//! object per line with sorted keys:
//!
//! ```text
//! {"coeffs":["-20468736","-1080","1"],"k":24,"p":2}
//! ```
//!
//! Lines are ordered by weight and the file is rewritten whole on every new
//! record, so its bytes depend only on the set of records it holds.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hecke::{charpoly, HeckeSpec, IntPoly};

/// One cached characteristic polynomial. Field order is the sorted key order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub coeffs: IntPoly,
    pub k: u32,
    pub p: u64,
}

impl CacheRecord {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

#[derive(Debug, Default)]
pub struct CharpolyCache {
    dir: Option<PathBuf>,
    memory: RwLock<HashMap<(u64, u32), Arc<IntPoly>>>,
    loaded: Mutex<HashSet<u64>>,
    // Serializes every file rewrite.
    writer: Mutex<()>,
}

impl CharpolyCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn persistent(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self {
            dir: Some(dir),
            ..Self::default()
        })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn file_for(dir: &Path, p: u64) -> PathBuf {
        dir.join(format!("T_{p}.jsonl"))
    }

    fn load(&self, p: u64) -> Result<()> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        let mut loaded = self.loaded.lock().unwrap();
        if !loaded.insert(p) {
            return Ok(());
        }
        let path = Self::file_for(dir, p);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(()),
            Err(e) => return Err(e.into()),
        };
        let mut memory = self.memory.write().unwrap();
        for (lineno, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let rec: CacheRecord = serde_json::from_str(line).map_err(|e| {
                Error::Cache(format!("{}:{}: {e}", path.display(), lineno + 1))
            })?;
            if rec.p != p {
                return Err(Error::Cache(format!(
                    "{}:{}: record for T_{} in the file of T_{p}",
                    path.display(),
                    lineno + 1,
                    rec.p
                )));
            }
            memory.insert((p, rec.k), Arc::new(rec.coeffs));
        }
        Ok(())
    }

    fn persist(&self, p: u64) -> Result<()> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        let _guard = self.writer.lock().unwrap();
        let records: BTreeMap<u32, Arc<IntPoly>> = self
            .memory
            .read()
            .unwrap()
            .iter()
            .filter(|((q, _), _)| *q == p)
            .map(|((_, k), f)| (*k, Arc::clone(f)))
            .collect();
        let mut body = String::new();
        for (k, f) in records {
            let rec = CacheRecord {
                coeffs: (*f).clone(),
                k,
                p,
            };
            body.push_str(&rec.to_line());
            body.push('\n');
        }
        let path = Self::file_for(dir, p);
        let tmp = path.with_extension("jsonl.tmp");
        fs::write(&tmp, body)?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    pub fn get(&self, p: u64, k: u32) -> Result<Option<Arc<IntPoly>>> {
        self.load(p)?;
        Ok(self.memory.read().unwrap().get(&(p, k)).cloned())
    }

    /// `T_{p,k}(x)`, computed at most once per key in the common case.
    /// Concurrent misses on the same key may both compute; the results are
    /// identical and the first insert wins.
    pub fn charpoly(&self, p: u64, k: u32) -> Result<Arc<IntPoly>> {
        if let Some(f) = self.get(p, k)? {
            return Ok(f);
        }
        let f = Arc::new(charpoly(&HeckeSpec::new(p, k)?)?);
        let inserted = {
            let mut memory = self.memory.write().unwrap();
            match memory.get(&(p, k)) {
                Some(existing) if **existing != *f => {
                    return Err(Error::Cache(format!(
                        "recomputed T_{{{p},{k}}} differs from the cached value"
                    )));
                }
                Some(existing) => return Ok(Arc::clone(existing)),
                None => {
                    memory.insert((p, k), Arc::clone(&f));
                    true
                }
            }
        };
        if inserted {
            self.persist(p)?;
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_line_format() {
        let rec = CacheRecord {
            coeffs: IntPoly::from_i64s(&[-20468736, -1080, 1]),
            k: 24,
            p: 2,
        };
        assert_eq!(rec.to_line(), r#"{"coeffs":["-20468736","-1080","1"],"k":24,"p":2}"#);
        let back: CacheRecord = serde_json::from_str(&rec.to_line()).unwrap();
        assert_eq!(back, rec);
        // zero prints unsigned
        let z = CacheRecord {
            coeffs: IntPoly::from_i64s(&[0, 1]),
            k: 0,
            p: 3,
        };
        assert!(z.to_line().contains(r#"["0","1"]"#));
    }

    #[test]
    fn persistent_cache_is_byte_stable() {
        let dir = tempfile::tempdir().unwrap();
        let first = {
            let c = CharpolyCache::persistent(dir.path()).unwrap();
            for k in [36u32, 12, 24] {
                c.charpoly(2, k).unwrap();
            }
            fs::read(CharpolyCache::file_for(dir.path(), 2)).unwrap()
        };
        fs::remove_file(CharpolyCache::file_for(dir.path(), 2)).unwrap();
        let c = CharpolyCache::persistent(dir.path()).unwrap();
        for k in [24u32, 36, 12] {
            c.charpoly(2, k).unwrap();
        }
        let second = fs::read(CharpolyCache::file_for(dir.path(), 2)).unwrap();
        assert_eq!(first, second);
        let text = String::from_utf8(second).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().next().unwrap().contains(r#""k":12"#));

        // a fresh handle serves from disk
        let reread = CharpolyCache::persistent(dir.path()).unwrap();
        assert_eq!(
            *reread.get(2, 24).unwrap().unwrap(),
            IntPoly::from_i64s(&[-20468736, -1080, 1])
        );
    }

    #[test]
    fn corrupt_file_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(CharpolyCache::file_for(dir.path(), 2), "not json\n").unwrap();
        let c = CharpolyCache::persistent(dir.path()).unwrap();
        assert!(matches!(c.charpoly(2, 12), Err(Error::Cache(_))));
    }
}
