//! `manifest.json`: the model registry, the clip list, and assembly of
//! clips into embedding sets.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use fadkit_core::mds::DCASE_CATEGORIES;
use fadkit_core::{EmbeddingMatrix, Matrix, MomentAccumulator};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::io::{read_embeddings, read_header, write_bytes};
use crate::{Error, Result};

/// System name of the reference set.
pub const REFERENCE_SYSTEM: &str = "reference";

const RATE_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub dim: usize,
    pub rate_hz: f64,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub clip_id: String,
    /// Relative paths are resolved against the manifest's directory.
    pub path: String,
    pub category: String,
    pub system: String,
    pub model: String,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub models: BTreeMap<String, ModelSpec>,
    /// Closed category set; the seven DCASE labels when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub categories: Option<Vec<String>>,
    pub entries: Vec<ManifestEntry>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
    #[serde(skip)]
    base_dir: PathBuf,
}

impl Manifest {
    pub fn new(
        models: BTreeMap<String, ModelSpec>,
        categories: Option<Vec<String>>,
        entries: Vec<ManifestEntry>,
        base_dir: impl Into<PathBuf>,
    ) -> Result<Self> {
        let m = Manifest {
            models,
            categories,
            entries,
            extra: BTreeMap::new(),
            base_dir: base_dir.into(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(Error::io(path))?;
        let mut m: Manifest = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        m.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        m.validate()?;
        Ok(m)
    }

    /// Writes pretty JSON. Entry paths are written as stored, so they must be
    /// valid relative to the destination's directory.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(self).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        bytes.push(b'\n');
        write_bytes(path, &bytes)
    }

    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }

    pub fn set_base_dir(&mut self, dir: impl Into<PathBuf>) {
        self.base_dir = dir.into();
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::Manifest("no entries".into()));
        }
        for (name, spec) in &self.models {
            if spec.dim == 0 || !(spec.rate_hz.is_finite() && spec.rate_hz > 0.0) {
                return Err(Error::Manifest(format!(
                    "model {name}: dim must be positive and rate_hz positive and finite"
                )));
            }
        }
        let categories = self.categories();
        let mut seen_categories = HashSet::new();
        for c in &categories {
            if c.is_empty() || c.contains('/') {
                return Err(Error::Manifest(format!("category {c:?} must be nonempty and contain no '/'")));
            }
            if !seen_categories.insert(c.as_str()) {
                return Err(Error::Manifest(format!("category {c} declared twice")));
            }
        }
        let mut ids = HashSet::new();
        for e in &self.entries {
            if !ids.insert(e.clip_id.as_str()) {
                return Err(Error::Manifest(format!("duplicate clip_id {}", e.clip_id)));
            }
            if !seen_categories.contains(e.category.as_str()) {
                return Err(Error::Manifest(format!(
                    "clip {}: category {} is not declared",
                    e.clip_id, e.category
                )));
            }
            if !self.models.contains_key(&e.model) {
                return Err(Error::Manifest(format!(
                    "clip {}: model {} is not registered",
                    e.clip_id, e.model
                )));
            }
            if e.system.is_empty() {
                return Err(Error::Manifest(format!("clip {}: empty system", e.clip_id)));
            }
        }
        Ok(())
    }

    /// The declared closed category set, in declaration order.
    pub fn categories(&self) -> Vec<String> {
        match &self.categories {
            Some(c) => c.clone(),
            None => DCASE_CATEGORIES.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn model(&self, name: &str) -> Result<&ModelSpec> {
        self.models
            .get(name)
            .ok_or_else(|| Error::Config(format!("model {name} is not in the manifest registry")))
    }

    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        self.base_dir.join(&entry.path)
    }

    /// Systems with clips for `model`, in order of first appearance.
    pub fn systems(&self, model: &str) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for e in self.entries.iter().filter(|e| e.model == model) {
            if !out.contains(&e.system) {
                out.push(e.system.clone());
            }
        }
        out
    }

    /// Declared categories that have at least one clip for `(model, system)`.
    pub fn categories_of(&self, model: &str, system: &str) -> Vec<String> {
        let present: HashSet<&str> = self
            .entries
            .iter()
            .filter(|e| e.model == model && e.system == system)
            .map(|e| e.category.as_str())
            .collect();
        self.categories()
            .into_iter()
            .filter(|c| present.contains(c.as_str()))
            .collect()
    }

    pub fn matching<'a>(&'a self, filter: &'a SetFilter) -> impl Iterator<Item = &'a ManifestEntry> + 'a {
        self.entries.iter().filter(move |e| filter.matches(e))
    }

    /// Reads every clip's header and checks it against the model registry.
    pub fn verify_headers(&self) -> Result<()> {
        for e in &self.entries {
            let header = read_header(&self.resolve(e))?;
            self.check_header(e, header.dim as usize, header.frame_rate_hz)?;
        }
        Ok(())
    }

    fn check_header(&self, e: &ManifestEntry, dim: usize, rate_hz: f64) -> Result<()> {
        let spec = &self.models[&e.model];
        if dim != spec.dim {
            return Err(Error::Clip {
                clip_id: e.clip_id.clone(),
                source: fadkit_core::Error::DimensionMismatch {
                    expected: spec.dim,
                    found: dim,
                },
            });
        }
        if (rate_hz - spec.rate_hz).abs() > RATE_REL_TOL * spec.rate_hz {
            return Err(Error::Data(format!(
                "clip {}: frame rate {rate_hz} Hz differs from model {} ({} Hz)",
                e.clip_id, e.model, spec.rate_hz
            )));
        }
        Ok(())
    }

    /// Reads one clip and validates its header against the registry.
    pub fn read_clip(&self, e: &ManifestEntry) -> Result<EmbeddingMatrix> {
        let m = read_embeddings(&self.resolve(e)).map_err(|err| match err {
            Error::File { source, .. } => Error::Clip {
                clip_id: e.clip_id.clone(),
                source,
            },
            other => other,
        })?;
        self.check_header(e, m.dim(), m.frame_rate_hz())?;
        Ok(m)
    }
}

/// Selects the clips of one system (and optionally one category) for one
/// model.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetFilter {
    pub system: String,
    pub category: Option<String>,
    pub model: String,
}

impl SetFilter {
    pub fn new(system: &str, category: Option<&str>, model: &str) -> Self {
        SetFilter {
            system: system.into(),
            category: category.map(Into::into),
            model: model.into(),
        }
    }

    pub fn matches(&self, e: &ManifestEntry) -> bool {
        e.system == self.system
            && e.model == self.model
            && self.category.as_ref().is_none_or(|c| *c == e.category)
    }

    /// `system` or `system/category`.
    pub fn set_id(&self) -> String {
        match &self.category {
            Some(c) => format!("{}/{c}", self.system),
            None => self.system.clone(),
        }
    }
}

/// Frames of all matching clips, concatenated in manifest order.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    pub set_id: String,
    pub frames: Matrix,
    pub member_count: usize,
}

pub fn collect_set(manifest: &Manifest, filter: &SetFilter) -> Result<EmbeddingSet> {
    let dim = manifest.model(&filter.model)?.dim;
    let mut data = Vec::new();
    let mut member_count = 0;
    for e in manifest.matching(filter) {
        let clip = manifest.read_clip(e)?;
        data.extend(clip.frames().iter().map(|&v| f64::from(v)));
        member_count += 1;
    }
    if member_count == 0 {
        return Err(Error::Data(format!("no clips match set {}", filter.set_id())));
    }
    let rows = data.len() / dim;
    Ok(EmbeddingSet {
        set_id: filter.set_id(),
        frames: Matrix::from_vec(rows, dim, data)?,
        member_count,
    })
}

/// Streams the matching clips into a moment accumulator, in manifest order,
/// without materializing the concatenated frames.
pub fn accumulate_set(manifest: &Manifest, filter: &SetFilter) -> Result<(MomentAccumulator, usize)> {
    let dim = manifest.model(&filter.model)?.dim;
    let mut acc = MomentAccumulator::new(dim);
    let mut member_count = 0;
    for e in manifest.matching(filter) {
        let clip = manifest.read_clip(e)?;
        for i in 0..clip.frame_count() {
            acc.accumulate_f32(clip.frame(i)).map_err(Error::in_clip(&e.clip_id))?;
        }
        member_count += 1;
    }
    if member_count == 0 {
        return Err(Error::Data(format!("no clips match set {}", filter.set_id())));
    }
    Ok((acc, member_count))
}
