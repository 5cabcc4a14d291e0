//! Run configuration: one JSON file that, together with a corpus, fully
//! determines a mock-backend run.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::corpus::atomic_write;
use crate::error::{Error, Result};
use crate::extractor::DecodingPolicy;
use crate::features::SimilarityWeights;
use crate::harness::TestConfig;
use crate::llm::{Backend, ProviderConfig};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    Mock,
    Remote,
}

impl std::str::FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mock" => Ok(BackendKind::Mock),
            "remote" => Ok(BackendKind::Remote),
            other => Err(Error::InvalidArgument(format!("unknown backend {other:?} (mock or remote)"))),
        }
    }
}

/// Weights given inline or as a path to a weights file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightsSetting {
    Inline(SimilarityWeights),
    File(PathBuf),
}

impl Default for WeightsSetting {
    fn default() -> Self {
        WeightsSetting::Inline(SimilarityWeights::default())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub backend: BackendKind,
    pub provider: ProviderConfig,
    pub weights: WeightsSetting,
    pub n: usize,
    pub seed: u64,
    pub policy: DecodingPolicy,
    /// Path to a test-command file (see [`TestConfig`]).
    pub tests: Option<PathBuf>,
    /// Worker threads for batch work; `None` uses every core.
    pub concurrency: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            backend: BackendKind::Mock,
            provider: ProviderConfig::default(),
            weights: WeightsSetting::default(),
            n: 4,
            seed: 42,
            policy: DecodingPolicy::default(),
            tests: None,
            concurrency: None,
        }
    }
}

impl RunConfig {
    /// Loads a config; relative paths inside it are resolved against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let WeightsSetting::File(p) = &mut cfg.weights {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(p) = &mut cfg.tests {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        atomic_write(path, text.as_bytes())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if let WeightsSetting::Inline(w) = &self.weights {
            w.validate()?;
        }
        DecodingPolicy::new(self.policy.margin)?;
        self.provider.validate()
    }

    pub fn resolve_weights(&self) -> Result<SimilarityWeights> {
        match &self.weights {
            WeightsSetting::Inline(w) => Ok(*w),
            WeightsSetting::File(p) => SimilarityWeights::load(p),
        }
    }

    pub fn test_config(&self) -> Result<Option<TestConfig>> {
        self.tests.as_deref().map(TestConfig::load).transpose()
    }

    pub fn build_backend(&self) -> Result<Backend> {
        let tests = self.test_config()?.map(Arc::new);
        let backend = match self.backend {
            BackendKind::Mock => Backend::mock(),
            BackendKind::Remote => Backend::remote(self.provider.clone())?,
        };
        Ok(backend.with_tests(tests))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_fields() {
        let cfg: RunConfig = serde_json::from_str(r#"{"n": 8, "weights": {"alpha": 0.4, "beta": 0.2, "gamma": 0.2, "delta": 0.2}}"#).unwrap();
        assert_eq!(cfg.n, 8);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.backend, BackendKind::Mock);
        assert_eq!(cfg.resolve_weights().unwrap().alpha, 0.4);
    }

    #[test]
    fn relative_paths_follow_the_config_file() {
        let dir = tempfile::tempdir().unwrap();
        SimilarityWeights::default().save(&dir.path().join("w.json")).unwrap();
        std::fs::write(dir.path().join("run.json"), r#"{"weights": "w.json"}"#).unwrap();
        let cfg = RunConfig::load(&dir.path().join("run.json")).unwrap();
        assert_eq!(cfg.weights, WeightsSetting::File(dir.path().join("w.json")));
        assert_eq!(cfg.resolve_weights().unwrap(), SimilarityWeights::default());
    }

    #[test]
    fn round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        let cfg = RunConfig::default();
        cfg.save(&p).unwrap();
        assert_eq!(RunConfig::load(&p).unwrap(), cfg);
    }
}
