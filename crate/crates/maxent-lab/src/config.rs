//! Experiment configuration: JSON on disk, defaults for every field,
//! unknown keys rejected, validated before any run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::maxent_core::TrainConfig;
use crate::recursive_net::NetTrainConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    /// Instance generator name from the registry.
    pub kind: String,
    pub seed: u64,
    pub n_features: usize,
    pub y_size: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig { kind: "equiv".into(), seed: 0, n_features: 3, y_size: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorConfig {
    pub bins: usize,
    pub n_samples: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig { bins: 30, n_samples: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub generator: GeneratorConfig,
    pub solver: TrainConfig,
    pub net: NetTrainConfig,
    pub estimator: EstimatorConfig,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.estimator.bins < 2 {
            return Err(Error::Range { field: "estimator.bins".into(), message: "must be >= 2".into() });
        }
        if self.estimator.n_samples == 0 {
            return Err(Error::Range {
                field: "estimator.n_samples".into(),
                message: "must be >= 1".into(),
            });
        }
        if self.generator.n_features == 0 || self.generator.n_features > 16 {
            return Err(Error::Range {
                field: "generator.n_features".into(),
                message: "must be in 1..=16".into(),
            });
        }
        if self.generator.y_size == 0 {
            return Err(Error::Range {
                field: "generator.y_size".into(),
                message: "must be >= 1".into(),
            });
        }
        self.solver.validate()?;
        self.net.validate()?;
        Ok(())
    }
}

/// Load, default-fill and validate a config file. Parse errors carry
/// serde_json's line/column; unknown keys are rejected.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    let cfg: ExperimentConfig = serde_json::from_str(&text)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn save_config(path: &Path, cfg: &ExperimentConfig) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(cfg)?)?;
    Ok(())
}

/// Hash of the canonical JSON form. serde_json maps sort their keys, so
/// the hash is stable under key reordering in the source file.
pub fn config_hash(value: &serde_json::Value) -> String {
    let canonical = serde_json::to_string(value).expect("value serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn hash_of<T: Serialize>(cfg: &T) -> Result<String> {
    Ok(config_hash(&serde_json::to_value(cfg)?))
}

/// Provenance record for one CLI run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub wall_ms: u128,
    pub outputs: Vec<String>,
    pub summary: BTreeMap<String, f64>,
}

/// Seed for sweep cell `index` under a base seed.
pub fn cell_seed(base: u64, index: u64) -> u64 {
    base ^ index
}
