//! Read-only access to clean source images.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use image::RgbImage;

use crate::error::{Error, Result};

/// Source of clean images addressed by the relative paths in a manifest.
///
/// Implementations must tolerate concurrent reads.
pub trait ImageStore: Send + Sync {
    fn load(&self, path: &str) -> Result<RgbImage>;

    fn dimensions(&self, path: &str) -> Result<(u32, u32)> {
        self.load(path).map(|img| img.dimensions())
    }
}

/// Images on disk, resolved against a base directory (usually the manifest's).
#[derive(Debug, Clone)]
pub struct DirStore {
    root: PathBuf,
}

impl DirStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        DirStore { root: root.into() }
    }

    /// Store rooted at the directory holding `manifest`.
    pub fn for_manifest(manifest: &Path) -> Self {
        DirStore::new(manifest.parent().unwrap_or(Path::new(".")))
    }

    pub fn resolve(&self, path: &str) -> PathBuf {
        self.root.join(path)
    }
}

impl ImageStore for DirStore {
    fn load(&self, path: &str) -> Result<RgbImage> {
        let full = self.resolve(path);
        let img = image::open(&full).map_err(|e| Error::UnreadableSource {
            path: full.clone(),
            reason: e.to_string(),
        })?;
        Ok(img.to_rgb8())
    }

    fn dimensions(&self, path: &str) -> Result<(u32, u32)> {
        let full = self.resolve(path);
        image::image_dimensions(&full).map_err(|e| Error::UnreadableSource {
            path: full,
            reason: e.to_string(),
        })
    }
}

/// In-memory store, mostly for tests and synthetic runs.
#[derive(Debug, Clone, Default)]
pub struct MemStore {
    images: HashMap<String, RgbImage>,
}

impl MemStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, path: impl Into<String>, img: RgbImage) {
        self.images.insert(path.into(), img);
    }
}

impl ImageStore for MemStore {
    fn load(&self, path: &str) -> Result<RgbImage> {
        self.images.get(path).cloned().ok_or_else(|| Error::UnreadableSource {
            path: PathBuf::from(path),
            reason: "not in memory store".into(),
        })
    }
}
