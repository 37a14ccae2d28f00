//! The single JSON run configuration shared by every subcommand.
//!
//! One file fully determines a run: paths, endpoints, generation knobs,
//! sampling seed, and evaluation flags. Relative paths are resolved
//! against the config file's directory so checked-in configs travel.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::client::{EndpointConfig, GenerationParams};
use crate::embedding::{content_hash, MIN_HASHING_DIM};
use crate::eval::{Metric, PcaFit};
use crate::pipeline::{concat_input, SummaryPair, SyntheticRecord, DEFAULT_FAILURE_CEILING};
use crate::prompt::SamplingMode;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Which generated text the evaluation embeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbedSource {
    /// Synopsis and sentiment joined into one paragraph (the default).
    Concat,
    Synopsis,
    Sentiment,
}

impl EmbedSource {
    pub fn of_pair(self, pair: &SummaryPair) -> String {
        match self {
            EmbedSource::Concat => concat_input(&pair.synopsis, &pair.sentiment),
            EmbedSource::Synopsis => pair.synopsis.clone(),
            EmbedSource::Sentiment => pair.sentiment.clone(),
        }
    }

    pub fn of_record(self, record: &SyntheticRecord) -> String {
        match self {
            EmbedSource::Concat => concat_input(&record.synopsis, &record.sentiment),
            EmbedSource::Synopsis => record.synopsis.clone(),
            EmbedSource::Sentiment => record.sentiment.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbedBackendKind {
    Hashing,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbeddingSection {
    pub backend: EmbedBackendKind,
    /// Hashing-backend dimension.
    pub dim: usize,
    /// Remote-backend endpoint.
    pub endpoint: EndpointConfig,
    /// Content-addressed cache file; defaults to
    /// `<output_dir>/embedding_cache.jsonl` for the remote backend.
    pub cache_file: Option<PathBuf>,
}

impl Default for EmbeddingSection {
    fn default() -> Self {
        EmbeddingSection {
            backend: EmbedBackendKind::Hashing,
            dim: crate::embedding::DEFAULT_HASHING_DIM,
            endpoint: EndpointConfig {
                api_key_source: "EMBEDDING_API_KEY".into(),
                ..EndpointConfig::default()
            },
            cache_file: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationSection {
    pub params: GenerationParams,
    /// Abort when more than this fraction of planned records fail.
    pub failure_ceiling: f64,
    /// Worker threads for chat requests.
    pub concurrency: usize,
    /// Permit max_tokens outside the 300..=400 band.
    pub allow_token_escape: bool,
}

impl Default for GenerationSection {
    fn default() -> Self {
        GenerationSection {
            params: GenerationParams::default(),
            failure_ceiling: DEFAULT_FAILURE_CEILING,
            concurrency: 4,
            allow_token_escape: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvaluationSection {
    pub metric: Metric,
    pub lambda: f64,
    /// When set, pick lambda from this grid by dev-split RMSE instead of
    /// using `lambda` directly.
    pub lambda_grid: Option<Vec<f64>>,
    pub embed_source: EmbedSource,
    pub pca_fit: PcaFit,
}

impl Default for EvaluationSection {
    fn default() -> Self {
        EvaluationSection {
            metric: Metric::L2,
            lambda: 1.0,
            lambda_grid: None,
            embed_source: EmbedSource::Concat,
            pca_fit: PcaFit::Joint,
        }
    }
}

/// Everything one run needs. The seed is mandatory: there is no implicit
/// nondeterminism to fall back on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub corpus_dir: PathBuf,
    pub labels_file: PathBuf,
    pub splits_file: PathBuf,
    pub output_dir: PathBuf,
    pub seed: u64,
    #[serde(default = "default_variants")]
    pub variants_per_source: u32,
    #[serde(default = "default_sampling")]
    pub sampling: SamplingMode,
    #[serde(default)]
    pub chat: EndpointConfig,
    #[serde(default)]
    pub embedding: EmbeddingSection,
    #[serde(default)]
    pub generation: GenerationSection,
    #[serde(default)]
    pub evaluation: EvaluationSection,
}

fn default_variants() -> u32 {
    3
}

fn default_sampling() -> SamplingMode {
    SamplingMode::Uniform
}

impl RunConfig {
    /// Parse, resolve relative paths against the config's directory, and
    /// validate.
    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let raw = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: RunConfig = serde_json::from_str(&raw).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        for p in [
            &mut self.corpus_dir,
            &mut self.labels_file,
            &mut self.splits_file,
            &mut self.output_dir,
        ] {
            if p.is_relative() {
                *p = base.join(&p);
            }
        }
        if let Some(cache) = &mut self.embedding.cache_file {
            if cache.is_relative() {
                *cache = base.join(&cache);
            }
        }
    }

    /// Check invariants: input paths exist, numeric knobs are in range.
    /// The output directory is created on demand and need not exist yet.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !self.corpus_dir.is_dir() {
            return Err(ConfigError::Invalid(format!(
                "corpus_dir {} is not a directory",
                self.corpus_dir.display()
            )));
        }
        for (name, path) in [
            ("labels_file", &self.labels_file),
            ("splits_file", &self.splits_file),
        ] {
            if !path.is_file() {
                return Err(ConfigError::Invalid(format!(
                    "{name} {} does not exist",
                    path.display()
                )));
            }
        }
        if self.variants_per_source == 0 {
            return Err(ConfigError::Invalid(
                "variants_per_source must be at least 1".into(),
            ));
        }
        self.chat
            .validate()
            .map_err(|e| ConfigError::Invalid(format!("chat endpoint: {e}")))?;
        match self.embedding.backend {
            EmbedBackendKind::Hashing => {
                if self.embedding.dim < MIN_HASHING_DIM {
                    return Err(ConfigError::Invalid(format!(
                        "embedding.dim {} below minimum {MIN_HASHING_DIM}",
                        self.embedding.dim
                    )));
                }
            }
            EmbedBackendKind::Remote => {
                self.embedding
                    .endpoint
                    .validate()
                    .map_err(|e| ConfigError::Invalid(format!("embedding endpoint: {e}")))?;
            }
        }
        self.generation
            .params
            .validate(self.generation.allow_token_escape)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if !(0.0..=1.0).contains(&self.generation.failure_ceiling) {
            return Err(ConfigError::Invalid(format!(
                "failure_ceiling {} outside 0..=1",
                self.generation.failure_ceiling
            )));
        }
        if self.generation.concurrency == 0 {
            return Err(ConfigError::Invalid(
                "concurrency must be at least 1".into(),
            ));
        }
        if !(self.evaluation.lambda.is_finite() && self.evaluation.lambda >= 0.0) {
            return Err(ConfigError::Invalid(format!(
                "evaluation.lambda {} must be a non-negative finite number",
                self.evaluation.lambda
            )));
        }
        if let Some(grid) = &self.evaluation.lambda_grid {
            if grid.is_empty() {
                return Err(ConfigError::Invalid("lambda_grid must not be empty".into()));
            }
            if grid.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
                return Err(ConfigError::Invalid(
                    "lambda_grid entries must be non-negative finite numbers".into(),
                ));
            }
        }
        Ok(())
    }

    /// Hash of the effective configuration (after path resolution and
    /// flag overrides). Every report carries it so numbers stay bound to
    /// the exact settings that produced them.
    pub fn snapshot_hash(&self) -> String {
        content_hash(&serde_json::to_string(self).expect("config serializes"))
    }

    /// Stable run identifier derived from the snapshot hash.
    pub fn run_id(&self) -> String {
        format!("run-{}", &self.snapshot_hash()[..12])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn fixture_dir() -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir(dir.path().join("corpus")).unwrap();
        fs::write(dir.path().join("labels.csv"), "session_id,phq8_score\n").unwrap();
        fs::write(dir.path().join("splits.csv"), "session_id,split\n").unwrap();
        dir
    }

    fn minimal_json() -> &'static str {
        r#"{
            "corpus_dir": "corpus",
            "labels_file": "labels.csv",
            "splits_file": "splits.csv",
            "output_dir": "out",
            "seed": 7
        }"#
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let dir = fixture_dir();
        let path = dir.path().join("config.json");
        fs::write(&path, minimal_json()).unwrap();
        let cfg = RunConfig::load(&path).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.variants_per_source, 3);
        assert_eq!(cfg.sampling, SamplingMode::Uniform);
        assert_eq!(cfg.generation.params, GenerationParams::default());
        assert_eq!(cfg.embedding.backend, EmbedBackendKind::Hashing);
        assert_eq!(cfg.embedding.dim, 256);
        assert_eq!(cfg.evaluation.metric, Metric::L2);
        assert_eq!(cfg.evaluation.lambda, 1.0);
        assert_eq!(cfg.evaluation.embed_source, EmbedSource::Concat);
        // Paths resolved against the config's directory.
        assert_eq!(cfg.corpus_dir, dir.path().join("corpus"));
        assert_eq!(cfg.output_dir, dir.path().join("out"));
    }

    #[test]
    fn missing_seed_is_a_parse_error() {
        let dir = fixture_dir();
        let path = dir.path().join("config.json");
        fs::write(
            &path,
            r#"{"corpus_dir": "corpus", "labels_file": "labels.csv",
                "splits_file": "splits.csv", "output_dir": "out"}"#,
        )
        .unwrap();
        let err = RunConfig::load(&path).unwrap_err();
        assert!(matches!(err, ConfigError::Parse { .. }));
        assert!(err.to_string().contains("seed"));
    }

    #[test]
    fn missing_labels_file_is_invalid() {
        let dir = fixture_dir();
        fs::remove_file(dir.path().join("labels.csv")).unwrap();
        let path = dir.path().join("config.json");
        fs::write(&path, minimal_json()).unwrap();
        let err = RunConfig::load(&path).unwrap_err();
        assert!(matches!(err, ConfigError::Invalid(_)));
        assert!(err.to_string().contains("labels_file"));
    }

    #[test]
    fn bad_knobs_rejected() {
        let dir = fixture_dir();
        let path = dir.path().join("config.json");
        let base = minimal_json().trim_end_matches('}');
        for (extra, needle) in [
            (r#","variants_per_source": 0"#, "variants_per_source"),
            (
                r#","generation": {"failure_ceiling": 1.5}"#,
                "failure_ceiling",
            ),
            (r#","generation": {"concurrency": 0}"#, "concurrency"),
            (
                r#","generation": {"params": {"max_tokens": 100}}"#,
                "max_tokens",
            ),
            (r#","embedding": {"dim": 4}"#, "embedding.dim"),
            (r#","evaluation": {"lambda": -1.0}"#, "lambda"),
            (r#","evaluation": {"lambda_grid": []}"#, "lambda_grid"),
        ] {
            fs::write(&path, format!("{base}{extra}}}")).unwrap();
            let err = RunConfig::load(&path).unwrap_err();
            assert!(
                err.to_string().contains(needle),
                "expected {needle} in: {err}"
            );
        }
    }

    #[test]
    fn token_escape_lifts_the_band() {
        let dir = fixture_dir();
        let path = dir.path().join("config.json");
        let base = minimal_json().trim_end_matches('}');
        fs::write(
            &path,
            format!(
                r#"{base},"generation": {{"params": {{"max_tokens": 100}},
                    "allow_token_escape": true}}}}"#
            ),
        )
        .unwrap();
        assert!(RunConfig::load(&path).is_ok());
    }

    #[test]
    fn snapshot_hash_tracks_content() {
        let dir = fixture_dir();
        let path = dir.path().join("config.json");
        fs::write(&path, minimal_json()).unwrap();
        let a = RunConfig::load(&path).unwrap();
        let b = RunConfig::load(&path).unwrap();
        assert_eq!(a.snapshot_hash(), b.snapshot_hash());
        assert!(a.run_id().starts_with("run-"));
        assert_eq!(a.run_id().len(), 4 + 12);

        let mut c = a.clone();
        c.seed = 8;
        assert_ne!(a.snapshot_hash(), c.snapshot_hash());
    }

    #[test]
    fn embed_source_selects_text() {
        use crate::pipeline::{GenerationMeta, PerItem};
        let pair = SummaryPair {
            session_id: "s1".into(),
            synopsis: "The participant rested.".into(),
            sentiment: "The tone was calm.".into(),
            meta: GenerationMeta {
                model_name: "m".into(),
                params: GenerationParams::default(),
                completed_unix_ms: 0,
                attempts: PerItem {
                    synopsis: 1,
                    sentiment: 1,
                },
                repaired: PerItem {
                    synopsis: false,
                    sentiment: false,
                },
                latency_ms: 0,
                repetition_penalty_omitted: false,
            },
        };
        assert_eq!(
            EmbedSource::Concat.of_pair(&pair),
            "The participant rested. The tone was calm."
        );
        assert_eq!(
            EmbedSource::Synopsis.of_pair(&pair),
            "The participant rested."
        );
        assert_eq!(EmbedSource::Sentiment.of_pair(&pair), "The tone was calm.");
    }

    #[test]
    fn config_round_trips_through_json() {
        let dir = fixture_dir();
        let path = dir.path().join("config.json");
        fs::write(&path, minimal_json()).unwrap();
        let cfg = RunConfig::load(&path).unwrap();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
    }
}
