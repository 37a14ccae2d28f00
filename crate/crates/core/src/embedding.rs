//! Embedding acquisition: a remote embeddings endpoint or the
//! deterministic feature-hashing fallback, fronted by a content-addressed
//! cache.
//!
//! The cache is an append-only JSONL file keyed by the SHA-256 of the
//! text, so identical texts never hit the backend twice, across runs and
//! across providers of the same dimension.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::client::EndpointConfig;
use crate::rng::fnv1a64;

/// Smallest permitted fallback dimension.
pub const MIN_HASHING_DIM: usize = 16;

/// Default fallback dimension: small enough for exact desk-scale linear
/// algebra, large enough to separate fixture vocabularies.
pub const DEFAULT_HASHING_DIM: usize = 256;

#[derive(Debug, thiserror::Error)]
pub enum EmbeddingError {
    #[error("embedding transport failed: {0}")]
    TransportError(String),
    #[error("provider returned dim {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("text for {id:?} is empty or hashes to a zero vector")]
    EmptyText { id: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("malformed embeddings response: {0}")]
    ProtocolError(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} line {line}: bad cache entry: {message}")]
    CacheError {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

/// One embedded text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    pub owner_id: String,
    pub dim: usize,
    pub values: Vec<f64>,
}

/// Raw batch embedding source behind the cache.
pub trait EmbedBackend: Send + Sync {
    fn embed_batch(&self, inputs: &[&str]) -> Result<Vec<Vec<f64>>, EmbeddingError>;
}

/// `POST {base_url}/v1/embeddings` backend.
pub struct RemoteEmbedder {
    agent: ureq::Agent,
    url: String,
    bearer: Option<String>,
    model: String,
}

impl RemoteEmbedder {
    pub fn new(cfg: &EndpointConfig) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(cfg.timeout_s)))
            .build()
            .into();
        RemoteEmbedder {
            agent,
            url: format!("{}/v1/embeddings", cfg.base_url.trim_end_matches('/')),
            bearer: std::env::var(&cfg.api_key_source).ok(),
            model: cfg.model_name.clone(),
        }
    }
}

impl EmbedBackend for RemoteEmbedder {
    fn embed_batch(&self, inputs: &[&str]) -> Result<Vec<Vec<f64>>, EmbeddingError> {
        let body = serde_json::json!({ "model": self.model, "input": inputs });
        let mut builder = self.agent.post(&self.url);
        if let Some(key) = &self.bearer {
            builder = builder.header("authorization", format!("Bearer {key}"));
        }
        let mut resp = builder
            .send_json(&body)
            .map_err(|e| EmbeddingError::TransportError(e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| EmbeddingError::TransportError(format!("reading body: {e}")))?;
        if !(200..=299).contains(&status) {
            return Err(EmbeddingError::TransportError(format!(
                "HTTP {status}: {text}"
            )));
        }
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| EmbeddingError::ProtocolError(format!("response is not JSON: {e}")))?;
        let data = value
            .get("data")
            .and_then(|d| d.as_array())
            .ok_or_else(|| EmbeddingError::ProtocolError("response missing data array".into()))?;
        if data.len() != inputs.len() {
            return Err(EmbeddingError::ProtocolError(format!(
                "expected {} embeddings, got {}",
                inputs.len(),
                data.len()
            )));
        }
        data.iter()
            .map(|entry| {
                entry
                    .get("embedding")
                    .and_then(|e| e.as_array())
                    .map(|arr| arr.iter().filter_map(|v| v.as_f64()).collect::<Vec<f64>>())
                    .filter(|v| v.iter().all(|x| x.is_finite()))
                    .ok_or_else(|| {
                        EmbeddingError::ProtocolError("entry missing embedding array".into())
                    })
            })
            .collect()
    }
}

enum Backend {
    Hashing { dim: usize },
    Remote(Box<dyn EmbedBackend>),
}

/// Embedding source plus optional cache file.
pub struct EmbeddingProvider {
    backend: Backend,
    cache_path: Option<PathBuf>,
}

impl EmbeddingProvider {
    /// Deterministic offline fallback at the given dimension.
    pub fn hashing(dim: usize) -> Result<Self, EmbeddingError> {
        if dim < MIN_HASHING_DIM {
            return Err(EmbeddingError::InvalidInput(format!(
                "hashing dim {dim} below minimum {MIN_HASHING_DIM}"
            )));
        }
        Ok(EmbeddingProvider {
            backend: Backend::Hashing { dim },
            cache_path: None,
        })
    }

    /// Remote endpoint provider.
    pub fn remote(cfg: &EndpointConfig) -> Self {
        EmbeddingProvider {
            backend: Backend::Remote(Box::new(RemoteEmbedder::new(cfg))),
            cache_path: None,
        }
    }

    /// Provider over an arbitrary backend (testing seam).
    pub fn remote_with(backend: Box<dyn EmbedBackend>) -> Self {
        EmbeddingProvider {
            backend: Backend::Remote(backend),
            cache_path: None,
        }
    }

    pub fn with_cache(mut self, path: impl Into<PathBuf>) -> Self {
        self.cache_path = Some(path.into());
        self
    }
}

/// SHA-256 of the UTF-8 text, lowercase hex: the cache key.
pub fn content_hash(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    content_hash: String,
    dim: usize,
    values: Vec<f64>,
}

fn load_cache(path: &Path) -> Result<HashMap<String, CacheEntry>, EmbeddingError> {
    let raw = match std::fs::read_to_string(path) {
        Ok(raw) => raw,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(HashMap::new()),
        Err(source) => {
            return Err(EmbeddingError::Io {
                path: path.to_path_buf(),
                source,
            })
        }
    };
    let mut map = HashMap::new();
    for (idx, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let entry: CacheEntry =
            serde_json::from_str(line).map_err(|e| EmbeddingError::CacheError {
                path: path.to_path_buf(),
                line: idx + 1,
                message: e.to_string(),
            })?;
        map.insert(entry.content_hash.clone(), entry);
    }
    Ok(map)
}

fn append_cache(path: &Path, entries: &[CacheEntry]) -> Result<(), EmbeddingError> {
    if entries.is_empty() {
        return Ok(());
    }
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|source| EmbeddingError::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
    }
    let mut blob = String::new();
    for entry in entries {
        blob.push_str(&serde_json::to_string(entry).expect("cache entry serializes"));
        blob.push('\n');
    }
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|source| EmbeddingError::Io {
            path: path.to_path_buf(),
            source,
        })?;
    file.write_all(blob.as_bytes())
        .map_err(|source| EmbeddingError::Io {
            path: path.to_path_buf(),
            source,
        })
}

/// Feature-hashing embedder: whitespace-tokenize, lowercase, signed
/// FNV-1a bucket counts, L2-normalized.
pub fn hashing_embed(text: &str, dim: usize) -> Result<Vec<f64>, EmbeddingError> {
    assert!(
        dim >= MIN_HASHING_DIM,
        "dim {dim} below minimum {MIN_HASHING_DIM}"
    );
    let mut acc = vec![0.0f64; dim];
    let mut tokens = 0usize;
    for token in text.split_whitespace() {
        let hash = fnv1a64(token.to_ascii_lowercase().as_bytes());
        let bucket = (hash % dim as u64) as usize;
        let sign = if (hash >> 63) & 1 == 0 { 1.0 } else { -1.0 };
        acc[bucket] += sign;
        tokens += 1;
    }
    let norm = acc.iter().map(|v| v * v).sum::<f64>().sqrt();
    if tokens == 0 || norm == 0.0 {
        return Err(EmbeddingError::EmptyText { id: String::new() });
    }
    for v in &mut acc {
        *v /= norm;
    }
    Ok(acc)
}

/// Embed a batch of `(id, text)` items, preserving order.
///
/// The cache is consulted by content hash before any backend call;
/// misses are appended after a successful batch. All vectors in one call
/// must share a dimension.
pub fn embed_texts(
    provider: &EmbeddingProvider,
    items: &[(String, String)],
) -> Result<Vec<EmbeddingVector>, EmbeddingError> {
    {
        let mut seen = std::collections::BTreeSet::new();
        for (id, text) in items {
            if !seen.insert(id.as_str()) {
                return Err(EmbeddingError::InvalidInput(format!("duplicate id {id:?}")));
            }
            if text.trim().is_empty() {
                return Err(EmbeddingError::EmptyText { id: id.clone() });
            }
        }
    }

    let mut cache = match &provider.cache_path {
        Some(path) => load_cache(path)?,
        None => HashMap::new(),
    };

    let hashes: Vec<String> = items.iter().map(|(_, text)| content_hash(text)).collect();
    let mut resolved: Vec<Option<Vec<f64>>> = hashes
        .iter()
        .map(|h| cache.get(h).map(|e| e.values.clone()))
        .collect();

    let miss_indices: Vec<usize> = (0..items.len())
        .filter(|&i| resolved[i].is_none())
        .collect();
    if !miss_indices.is_empty() {
        let fresh: Vec<Vec<f64>> = match &provider.backend {
            Backend::Hashing { dim } => miss_indices
                .iter()
                .map(|&i| {
                    hashing_embed(&items[i].1, *dim).map_err(|e| match e {
                        EmbeddingError::EmptyText { .. } => EmbeddingError::EmptyText {
                            id: items[i].0.clone(),
                        },
                        other => other,
                    })
                })
                .collect::<Result<_, _>>()?,
            Backend::Remote(backend) => {
                let inputs: Vec<&str> = miss_indices.iter().map(|&i| items[i].1.as_str()).collect();
                backend.embed_batch(&inputs)?
            }
        };
        let mut new_entries = Vec::with_capacity(fresh.len());
        for (&i, values) in miss_indices.iter().zip(fresh) {
            let hash = hashes[i].clone();
            new_entries.push(CacheEntry {
                content_hash: hash.clone(),
                dim: values.len(),
                values: values.clone(),
            });
            cache.insert(
                hash,
                CacheEntry {
                    content_hash: hashes[i].clone(),
                    dim: values.len(),
                    values: values.clone(),
                },
            );
            resolved[i] = Some(values);
        }
        if let Some(path) = &provider.cache_path {
            append_cache(path, &new_entries)?;
        }
    }

    let vectors: Vec<EmbeddingVector> = items
        .iter()
        .zip(resolved)
        .map(|((id, _), values)| {
            let values = values.expect("all items resolved");
            EmbeddingVector {
                owner_id: id.clone(),
                dim: values.len(),
                values,
            }
        })
        .collect();

    let expected = vectors[0].dim;
    for v in &vectors {
        if v.dim != expected {
            return Err(EmbeddingError::DimensionMismatch {
                expected,
                got: v.dim,
            });
        }
        if v.values.iter().any(|x| !x.is_finite()) {
            return Err(EmbeddingError::ProtocolError(format!(
                "non-finite value in embedding for {:?}",
                v.owner_id
            )));
        }
    }
    Ok(vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicU32, Ordering};
    use std::sync::Arc;

    struct CountingBackend {
        calls: Arc<AtomicU32>,
        dim: usize,
    }

    impl EmbedBackend for CountingBackend {
        fn embed_batch(&self, inputs: &[&str]) -> Result<Vec<Vec<f64>>, EmbeddingError> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            Ok(inputs
                .iter()
                .map(|t| {
                    let mut v = vec![0.0; self.dim];
                    v[t.len() % self.dim] = 1.0;
                    v
                })
                .collect())
        }
    }

    #[test]
    fn hashing_is_scale_invariant() {
        let a = hashing_embed("a a", 256).unwrap();
        let b = hashing_embed("a", 256).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hashing_vectors_are_unit_norm() {
        for text in ["one", "several words in here", "sad tired hopeless content"] {
            let v = hashing_embed(text, 64).unwrap();
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-9, "norm {norm} for {text:?}");
        }
    }

    #[test]
    fn hashing_cosine_pinned_for_disjoint_buckets() {
        // FNV-1a 64 sends a,b,c,d to buckets 140,165,242,115 (mod 256),
        // all distinct, so the two vectors are exactly orthogonal.
        let ab = hashing_embed("a b", 256).unwrap();
        let cd = hashing_embed("c d", 256).unwrap();
        let cosine: f64 = ab.iter().zip(&cd).map(|(x, y)| x * y).sum();
        assert_eq!(cosine, 0.0);
    }

    #[test]
    fn hashing_rejects_empty_text() {
        assert!(matches!(
            hashing_embed("", 256),
            Err(EmbeddingError::EmptyText { .. })
        ));
        assert!(matches!(
            hashing_embed("   \t ", 256),
            Err(EmbeddingError::EmptyText { .. })
        ));
    }

    #[test]
    fn hashing_is_case_insensitive() {
        assert_eq!(
            hashing_embed("Sad Days", 64).unwrap(),
            hashing_embed("sad days", 64).unwrap()
        );
    }

    #[test]
    fn provider_rejects_tiny_dim() {
        assert!(matches!(
            EmbeddingProvider::hashing(8),
            Err(EmbeddingError::InvalidInput(_))
        ));
        assert!(EmbeddingProvider::hashing(16).is_ok());
    }

    #[test]
    fn identical_texts_embed_identically() {
        let provider = EmbeddingProvider::hashing(64).unwrap();
        let items = vec![
            ("id1".to_string(), "same words".to_string()),
            ("id2".to_string(), "same words".to_string()),
        ];
        let vs = embed_texts(&provider, &items).unwrap();
        assert_eq!(vs[0].values, vs[1].values);
        assert_eq!(vs[0].owner_id, "id1");
        assert_eq!(vs[1].owner_id, "id2");
    }

    #[test]
    fn duplicate_ids_rejected() {
        let provider = EmbeddingProvider::hashing(64).unwrap();
        let items = vec![
            ("same".to_string(), "text one".to_string()),
            ("same".to_string(), "text two".to_string()),
        ];
        assert!(matches!(
            embed_texts(&provider, &items),
            Err(EmbeddingError::InvalidInput(_))
        ));
    }

    #[test]
    fn empty_text_rejected_with_owner_id() {
        let provider = EmbeddingProvider::hashing(64).unwrap();
        let items = vec![("who".to_string(), "  ".to_string())];
        match embed_texts(&provider, &items) {
            Err(EmbeddingError::EmptyText { id }) => assert_eq!(id, "who"),
            other => panic!("expected EmptyText, got {other:?}"),
        }
    }

    #[test]
    fn inconsistent_remote_dims_rejected() {
        struct Uneven;
        impl EmbedBackend for Uneven {
            fn embed_batch(&self, inputs: &[&str]) -> Result<Vec<Vec<f64>>, EmbeddingError> {
                Ok(inputs
                    .iter()
                    .enumerate()
                    .map(|(i, _)| vec![1.0; 8 + i])
                    .collect())
            }
        }
        let provider = EmbeddingProvider::remote_with(Box::new(Uneven));
        let items = vec![
            ("a".to_string(), "first text".to_string()),
            ("b".to_string(), "second text".to_string()),
        ];
        assert!(matches!(
            embed_texts(&provider, &items),
            Err(EmbeddingError::DimensionMismatch {
                expected: 8,
                got: 9
            })
        ));
    }

    #[test]
    fn cache_round_trip_avoids_second_backend_call() {
        let dir = tempfile::tempdir().unwrap();
        let cache = dir.path().join("embeddings_cache.jsonl");
        let items = vec![
            ("a".to_string(), "first text".to_string()),
            ("b".to_string(), "second longer text".to_string()),
        ];

        let first_calls = Arc::new(AtomicU32::new(0));
        let provider = EmbeddingProvider::remote_with(Box::new(CountingBackend {
            calls: Arc::clone(&first_calls),
            dim: 32,
        }))
        .with_cache(&cache);
        let first = embed_texts(&provider, &items).unwrap();
        assert_eq!(first_calls.load(Ordering::SeqCst), 1);

        let second_calls = Arc::new(AtomicU32::new(0));
        let provider2 = EmbeddingProvider::remote_with(Box::new(CountingBackend {
            calls: Arc::clone(&second_calls),
            dim: 32,
        }))
        .with_cache(&cache);
        let second = embed_texts(&provider2, &items).unwrap();
        assert_eq!(second_calls.load(Ordering::SeqCst), 0);

        let a = serde_json::to_string(&first).unwrap();
        let b = serde_json::to_string(&second).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn partial_cache_hits_only_fetch_misses() {
        let dir = tempfile::tempdir().unwrap();
        let cache = dir.path().join("cache.jsonl");
        let provider = EmbeddingProvider::remote_with(Box::new(CountingBackend {
            calls: Arc::new(AtomicU32::new(0)),
            dim: 32,
        }))
        .with_cache(&cache);
        embed_texts(&provider, &[("a".to_string(), "alpha".to_string())]).unwrap();

        struct OnlyBeta;
        impl EmbedBackend for OnlyBeta {
            fn embed_batch(&self, inputs: &[&str]) -> Result<Vec<Vec<f64>>, EmbeddingError> {
                assert_eq!(inputs, ["beta"]);
                Ok(vec![vec![0.5; 32]])
            }
        }
        let provider2 = EmbeddingProvider::remote_with(Box::new(OnlyBeta)).with_cache(&cache);
        let vs = embed_texts(
            &provider2,
            &[
                ("a".to_string(), "alpha".to_string()),
                ("b".to_string(), "beta".to_string()),
            ],
        )
        .unwrap();
        assert_eq!(vs.len(), 2);
        assert_eq!(vs[1].values, vec![0.5; 32]);
    }

    #[test]
    fn corrupt_cache_line_is_reported_with_location() {
        let dir = tempfile::tempdir().unwrap();
        let cache = dir.path().join("cache.jsonl");
        std::fs::write(&cache, "{\"content_hash\":\"x\"\n").unwrap();
        let provider = EmbeddingProvider::hashing(64).unwrap().with_cache(&cache);
        match embed_texts(&provider, &[("a".to_string(), "text".to_string())]) {
            Err(EmbeddingError::CacheError { line: 1, .. }) => {}
            other => panic!("expected CacheError at line 1, got {other:?}"),
        }
    }

    #[test]
    fn content_hash_is_stable_sha256() {
        // Well-known digest of the empty string, then a sanity change check.
        assert_eq!(
            content_hash(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        assert_ne!(content_hash("a"), content_hash("b"));
    }
}
