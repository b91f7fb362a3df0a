//! Content-addressed record cache, doubling as the sweep checkpoint.
//!
//! Each cell lives at `<root>/<h[..2]>/<h>.json` where `h` is the SHA-256 of
//! its key. Writes go to a temporary file first and are renamed into place.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{Compression, EvalRecord};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheKey {
    pub model_id: String,
    pub item_id: String,
    pub style_id: String,
    pub jpeg_quality: Compression,
    pub prompt_hash: String,
}

impl CacheKey {
    pub fn of(record: &EvalRecord) -> Self {
        CacheKey {
            model_id: record.model_id.clone(),
            item_id: record.item_id.clone(),
            style_id: record.style_id.clone(),
            jpeg_quality: record.jpeg_quality,
            prompt_hash: record.prompt_hash.clone(),
        }
    }

    pub fn digest(&self) -> String {
        let text = serde_json::to_string(&(
            &self.model_id,
            &self.item_id,
            &self.style_id,
            self.jpeg_quality,
            &self.prompt_hash,
        ))
        .expect("strings serialise");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[derive(Debug)]
pub struct Cache {
    root: PathBuf,
    tmp_counter: AtomicU64,
}

impl Cache {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| Error::unwritable(&root, e))?;
        Ok(Cache { root, tmp_counter: AtomicU64::new(0) })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path_for(&self, key: &CacheKey) -> PathBuf {
        let h = key.digest();
        self.root.join(&h[..2]).join(format!("{h}.json"))
    }

    /// The stored record with `cached = true`, if the cell is present.
    pub fn get(&self, key: &CacheKey) -> Result<Option<EvalRecord>> {
        let path = self.path_for(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::CacheCorrupt { path, reason: e.to_string() }),
        };
        let mut rec: EvalRecord = serde_json::from_str(&text)
            .map_err(|e| Error::CacheCorrupt { path: path.clone(), reason: e.to_string() })?;
        if CacheKey::of(&rec) != *key {
            return Err(Error::CacheCorrupt { path, reason: "stored record does not match its key".into() });
        }
        rec.cached = true;
        Ok(Some(rec))
    }

    /// Stores `record` (with `cached = false`) atomically.
    pub fn put(&self, record: &EvalRecord) -> Result<()> {
        let path = self.path_for(&CacheKey::of(record));
        let dir = path.parent().expect("cache paths have a parent");
        fs::create_dir_all(dir).map_err(|e| Error::unwritable(dir, e))?;
        let mut stored = record.clone();
        stored.cached = false;
        let n = self.tmp_counter.fetch_add(1, Ordering::Relaxed);
        let tmp = dir.join(format!(".tmp-{}-{n}", std::process::id()));
        fs::write(&tmp, serde_json::to_vec(&stored)?).map_err(|e| Error::unwritable(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::unwritable(&path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> EvalRecord {
        EvalRecord {
            model_id: "m".into(),
            item_id: "i".into(),
            style_id: "default".into(),
            jpeg_quality: Compression::Jpeg(80),
            raw_response: "The answer is (A).".into(),
            parsed_answer: Some("A".into()),
            correct: true,
            latency_ms: 12,
            cached: false,
            prompt_hash: "abc".into(),
            error: None,
        }
    }

    #[test]
    fn hit_equals_original_except_flag() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        let r = record();
        let key = CacheKey::of(&r);
        assert!(cache.get(&key).unwrap().is_none());
        cache.put(&r).unwrap();
        let mut hit = cache.get(&key).unwrap().unwrap();
        assert!(hit.cached);
        hit.cached = false;
        assert_eq!(hit, r);
    }

    #[test]
    fn prompt_change_misses() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        cache.put(&record()).unwrap();
        let mut key = CacheKey::of(&record());
        key.prompt_hash = "def".into();
        assert!(cache.get(&key).unwrap().is_none());
    }

    #[test]
    fn garbage_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        let key = CacheKey::of(&record());
        let path = cache.path_for(&key);
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, "{not json").unwrap();
        assert!(matches!(cache.get(&key), Err(Error::CacheCorrupt { .. })));
    }
}
