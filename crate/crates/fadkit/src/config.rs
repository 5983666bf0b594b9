//! Run configuration: command-line flags layered over an optional JSON
//! config file layered over defaults.

use std::fs;
use std::path::{Path, PathBuf};

use fadkit_core::BootstrapConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub const DEFAULT_PCA_K: usize = 128;
pub const DEFAULT_GRID_SIZE: usize = 64;
pub const DEFAULT_OUT: &str = "fadkit-out";
pub const THREADS_ENV: &str = "FADKIT_THREADS";

/// One configuration layer. Every field is optional so layers can be merged.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub manifest: Option<PathBuf>,
    pub ratings: Option<PathBuf>,
    pub fad_csv: Option<PathBuf>,
    pub model: Option<String>,
    pub reduce: Option<usize>,
    pub noise_std: Option<f64>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub system: Option<String>,
    pub category: Option<String>,
    pub grid_size: Option<usize>,
}

impl ConfigLayer {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `self` win over those in `lower`.
    pub fn over(self, lower: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            manifest: self.manifest.or(lower.manifest),
            ratings: self.ratings.or(lower.ratings),
            fad_csv: self.fad_csv.or(lower.fad_csv),
            model: self.model.or(lower.model),
            reduce: self.reduce.or(lower.reduce),
            noise_std: self.noise_std.or(lower.noise_std),
            reps: self.reps.or(lower.reps),
            seed: self.seed.or(lower.seed),
            out: self.out.or(lower.out),
            system: self.system.or(lower.system),
            category: self.category.or(lower.category),
            grid_size: self.grid_size.or(lower.grid_size),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub manifest: Option<PathBuf>,
    pub ratings: Option<PathBuf>,
    pub fad_csv: Option<PathBuf>,
    pub model: Option<String>,
    pub pca_k: Option<usize>,
    pub bootstrap: BootstrapConfig,
    pub system: Option<String>,
    pub category: Option<String>,
    pub grid_size: usize,
    #[serde(skip)]
    pub out: PathBuf,
}

impl RunConfig {
    /// Applies defaults and validates values and referenced paths.
    pub fn resolve(layer: ConfigLayer) -> Result<Self> {
        let defaults = BootstrapConfig::default();
        let config = RunConfig {
            manifest: layer.manifest,
            ratings: layer.ratings,
            fad_csv: layer.fad_csv,
            model: layer.model,
            pca_k: layer.reduce,
            bootstrap: BootstrapConfig {
                noise_std: layer.noise_std.unwrap_or(defaults.noise_std),
                reps: layer.reps.unwrap_or(defaults.reps),
                seed: layer.seed.unwrap_or(defaults.seed),
            },
            system: layer.system,
            category: layer.category,
            grid_size: layer.grid_size.unwrap_or(DEFAULT_GRID_SIZE),
            out: layer.out.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.pca_k == Some(0) {
            return Err(Error::Config("--reduce must be at least 1".into()));
        }
        let noise = self.bootstrap.noise_std;
        if !(noise.is_finite() && noise >= 0.0) {
            return Err(Error::Config("--noise-std must be finite and nonnegative".into()));
        }
        if self.bootstrap.reps == 0 {
            return Err(Error::Config("--reps must be at least 1".into()));
        }
        if self.grid_size == 0 {
            return Err(Error::Config("grid_size must be at least 1".into()));
        }
        for path in [&self.manifest, &self.ratings, &self.fad_csv].into_iter().flatten() {
            if !path.is_file() {
                return Err(Error::Config(format!("{} does not exist", path.display())));
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON of every setting except the output
    /// directory, as lowercase hex.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Worker count from `FADKIT_THREADS`; 0 or unset means one per core.
pub fn thread_count() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_ENV}={v:?} is not a nonnegative integer"))),
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(e) => Err(Error::Config(format!("{THREADS_ENV}: {e}"))),
    }
}

pub fn thread_pool() -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}
