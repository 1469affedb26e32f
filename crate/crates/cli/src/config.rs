//! JSON run configurations. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use mugl_core::{GraphFamily, ModelPreset, SignalSettings};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::exit::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateConfig {
    pub family: GraphFamily,
    pub m: usize,
    pub signals: SignalSettings,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnConfig {
    #[serde(default)]
    pub signals: Option<PathBuf>,
    pub preset: ModelPreset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    #[serde(default)]
    pub truth: Option<PathBuf>,
    #[serde(default)]
    pub pred: Option<PathBuf>,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub csv: Option<PathBuf>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            truth: None,
            pred: None,
            threshold: default_threshold(),
            csv: None,
        }
    }
}

fn default_threshold() -> f64 {
    mugl_core::eval::DEFAULT_THRESHOLD
}

/// Reads and parses a config file. Relative paths inside it are later
/// resolved against the file's directory.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<(T, PathBuf), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::io(format!("cannot read config {}: {e}", path.display())))?;
    let value = serde_json::from_str(&text)
        .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((value, base))
}

pub fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}
