//! Dataset manifest: a JSON index binding samples to ground truth, labels,
//! base-model features, and per-SNR noisy feature collections.
//!
//! All paths inside a manifest are relative to the directory containing the
//! manifest file.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::tensor::{read_tensor, Dtype};

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SampleEntry {
    pub id: String,
    pub label: usize,
    pub split: Split,
    pub ground_truth_path: String,
    pub feature_path: String,
    /// SNR in dB -> relative path of the noise-augmented feature tensor.
    #[serde(default)]
    pub noisy_features: BTreeMap<i32, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segmentation_mask_path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DatasetManifest {
    pub version: u32,
    pub classes: Vec<String>,
    pub samples: Vec<SampleEntry>,
}

/// Counts surfaced when a manifest is loaded.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestSummary {
    pub classes: usize,
    pub train_count: usize,
    pub test_count: usize,
}

impl DatasetManifest {
    pub fn summary(&self) -> ManifestSummary {
        let train_count = self
            .samples
            .iter()
            .filter(|s| s.split == Split::Train)
            .count();
        ManifestSummary {
            classes: self.classes.len(),
            train_count,
            test_count: self.samples.len() - train_count,
        }
    }

    /// Structural invariants: version, non-empty class list, label ranges,
    /// unique sample ids.
    pub fn validate_structure(&self) -> Result<()> {
        if self.version != MANIFEST_VERSION {
            return Err(Error::UnsupportedVersion(self.version));
        }
        if self.classes.is_empty() {
            return Err(Error::ManifestSchema("class list is empty".into()));
        }
        let mut seen = HashSet::new();
        for s in &self.samples {
            if !seen.insert(s.id.as_str()) {
                return Err(Error::DuplicateSampleId(s.id.clone()));
            }
            if s.label >= self.classes.len() {
                return Err(Error::LabelOutOfRange {
                    sample_id: s.id.clone(),
                    label: s.label,
                    classes: self.classes.len(),
                });
            }
        }
        Ok(())
    }

    /// Check that every referenced file exists under `base_dir`.
    pub fn validate_paths(&self, base_dir: &Path) -> Result<()> {
        for s in &self.samples {
            for p in s.referenced_paths() {
                let full = base_dir.join(&p);
                if !full.is_file() {
                    return Err(Error::DanglingPath {
                        sample_id: s.id.clone(),
                        path: full,
                    });
                }
            }
        }
        Ok(())
    }

    /// Deep check: every feature and noisy-feature file parses as a tensor,
    /// every mask parses as a u8 tensor. Ground truth is opaque bytes and is
    /// only checked for existence by [`validate_paths`].
    ///
    /// [`validate_paths`]: DatasetManifest::validate_paths
    pub fn verify_files(&self, base_dir: &Path) -> Result<()> {
        for s in &self.samples {
            read_tensor(base_dir.join(&s.feature_path))?;
            for p in s.noisy_features.values() {
                read_tensor(base_dir.join(p))?;
            }
            if let Some(mask) = &s.segmentation_mask_path {
                let t = read_tensor(base_dir.join(mask))?;
                if t.dtype() != Dtype::U8 {
                    return Err(Error::ManifestSchema(format!(
                        "sample {}: segmentation mask must be a u8 tensor",
                        s.id
                    )));
                }
            }
        }
        Ok(())
    }
}

impl SampleEntry {
    fn referenced_paths(&self) -> Vec<PathBuf> {
        let mut out = vec![
            PathBuf::from(&self.ground_truth_path),
            PathBuf::from(&self.feature_path),
        ];
        out.extend(self.noisy_features.values().map(PathBuf::from));
        if let Some(m) = &self.segmentation_mask_path {
            out.push(PathBuf::from(m));
        }
        out
    }
}

/// Load a manifest, checking structural invariants and path existence.
/// Missing files are reported with the offending sample id.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<DatasetManifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let manifest: DatasetManifest =
        serde_json::from_str(&text).map_err(|e| Error::ManifestSchema(e.to_string()))?;
    manifest.validate_structure()?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    manifest.validate_paths(base)?;
    Ok(manifest)
}

/// Write a manifest as pretty-printed JSON. Deterministic byte output.
pub fn save_manifest(manifest: &DatasetManifest, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
