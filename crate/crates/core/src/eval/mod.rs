//! The three evaluation axes over generated summaries: utility (ridge
//! regression on frozen embeddings, three training sets), fidelity (PCA
//! scatter), privacy (minimum-distance statistics), plus score-histogram
//! reports.

mod linalg;
mod pca;

pub use linalg::{fit_ridge, fit_ridge_opts, RidgeModel};
pub use pca::{pca_2d, pca_2d_opts, FidelityPoint, FidelityReport, PcaFit};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{DEPRESSION_CUTOFF, MAX_PHQ8};
use crate::embedding::{embed_texts, EmbeddingError, EmbeddingProvider, EmbeddingVector};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("input lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("normal equations are singular; use lambda > 0 on rank-deficient data")]
    SingularSystem,
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("score {0} outside 0..={MAX_PHQ8}")]
    ScoreOutOfRange(u8),
    #[error("empty base or query set")]
    EmptySet,
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

/// Whether a point came from the corpus or from the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceTag {
    Real,
    Synthetic,
}

impl SourceTag {
    pub fn label(self) -> &'static str {
        match self {
            SourceTag::Real => "real",
            SourceTag::Synthetic => "synthetic",
        }
    }
}

/// Distance used by the privacy statistics. Reports default to plain L2 on
/// the raw vectors; cosine distance (1 - cosine similarity) is available
/// for unit-norm embeddings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    L2,
    Cosine,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::L2 => "l2",
            Metric::Cosine => "cosine",
        }
    }

    fn distance(self, a: &[f64], b: &[f64]) -> Result<f64, EvalError> {
        match self {
            Metric::L2 => Ok(a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()),
            Metric::Cosine => {
                let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
                let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
                if na == 0.0 || nb == 0.0 {
                    return Err(EvalError::DegenerateData(
                        "cosine distance undefined for zero-norm vectors".into(),
                    ));
                }
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                Ok(1.0 - dot / (na * nb))
            }
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "l2" => Ok(Metric::L2),
            "cosine" => Ok(Metric::Cosine),
            other => Err(format!("unknown metric '{other}' (expected l2 or cosine)")),
        }
    }
}

/// Root mean squared error: sum of squared errors, divided by n, square
/// root last.
pub fn rmse(pred: &[f64], truth: &[f64]) -> Result<f64, EvalError> {
    check_pair(pred, truth)?;
    let sum_sq: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok((sum_sq / pred.len() as f64).sqrt())
}

/// Mean absolute error.
pub fn mae(pred: &[f64], truth: &[f64]) -> Result<f64, EvalError> {
    check_pair(pred, truth)?;
    let sum_abs: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t).abs()).sum();
    Ok(sum_abs / pred.len() as f64)
}

fn check_pair(pred: &[f64], truth: &[f64]) -> Result<(), EvalError> {
    if pred.len() != truth.len() {
        return Err(EvalError::LengthMismatch {
            left: pred.len(),
            right: truth.len(),
        });
    }
    if pred.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    Ok(())
}

/// One labeled training or test document: an id for embedding-cache
/// bookkeeping, the summary text, and its PHQ-8 label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledText {
    pub id: String,
    pub text: String,
    pub score: u8,
}

impl LabeledText {
    pub fn new(id: impl Into<String>, text: impl Into<String>, score: u8) -> Self {
        LabeledText {
            id: id.into(),
            text: text.into(),
            score,
        }
    }
}

/// The three training-set configurations of the utility experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrainConfig {
    RealOnly,
    SyntheticOnly,
    Combined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityRow {
    pub config: TrainConfig,
    pub rmse: f64,
    pub mae: f64,
    pub n_train: usize,
    pub n_test: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityReport {
    pub lambda: f64,
    pub rows: Vec<UtilityRow>,
}

impl UtilityReport {
    pub fn row(&self, config: TrainConfig) -> Option<&UtilityRow> {
        self.rows.iter().find(|r| r.config == config)
    }
}

/// Train one ridge model per configuration and score each on the same
/// test set. Predictions are clamped to the PHQ-8 range before metrics.
/// An empty synthetic set skips the SyntheticOnly row; RealOnly and
/// Combined are always reported.
pub fn utility_experiment(
    real_train: &[LabeledText],
    synthetic: &[LabeledText],
    test: &[LabeledText],
    provider: &EmbeddingProvider,
    lambda: f64,
) -> Result<UtilityReport, EvalError> {
    if real_train.is_empty() || test.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let (real_x, real_y) = embed_set(provider, real_train)?;
    let (test_x, test_y) = embed_set(provider, test)?;
    let mut rows = Vec::with_capacity(3);
    rows.push(fit_and_score(
        TrainConfig::RealOnly,
        &real_x,
        &real_y,
        &test_x,
        &test_y,
        lambda,
    )?);
    if !synthetic.is_empty() {
        let (syn_x, syn_y) = embed_set(provider, synthetic)?;
        rows.push(fit_and_score(
            TrainConfig::SyntheticOnly,
            &syn_x,
            &syn_y,
            &test_x,
            &test_y,
            lambda,
        )?);
        let mut both_x = real_x;
        both_x.extend(syn_x);
        let mut both_y = real_y;
        both_y.extend(syn_y);
        rows.push(fit_and_score(
            TrainConfig::Combined,
            &both_x,
            &both_y,
            &test_x,
            &test_y,
            lambda,
        )?);
    } else {
        rows.push(fit_and_score(
            TrainConfig::Combined,
            &real_x,
            &real_y,
            &test_x,
            &test_y,
            lambda,
        )?);
    }
    Ok(UtilityReport { lambda, rows })
}

/// Pick the penalty from `grid` that minimizes RMSE on the dev split when
/// training on `train`. Returns the winner plus the full grid trace for
/// the report. Ties keep the earliest grid entry.
pub fn select_lambda(
    train: &[LabeledText],
    dev: &[LabeledText],
    provider: &EmbeddingProvider,
    grid: &[f64],
) -> Result<(f64, Vec<(f64, f64)>), EvalError> {
    if train.is_empty() || dev.is_empty() || grid.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let (train_x, train_y) = embed_set(provider, train)?;
    let (dev_x, dev_y) = embed_set(provider, dev)?;
    let mut trace = Vec::with_capacity(grid.len());
    let mut best = (grid[0], f64::INFINITY);
    for &lambda in grid {
        let row = fit_and_score(
            TrainConfig::RealOnly,
            &train_x,
            &train_y,
            &dev_x,
            &dev_y,
            lambda,
        )?;
        trace.push((lambda, row.rmse));
        if row.rmse < best.1 {
            best = (lambda, row.rmse);
        }
    }
    Ok((best.0, trace))
}

fn embed_set(
    provider: &EmbeddingProvider,
    items: &[LabeledText],
) -> Result<(Vec<Vec<f64>>, Vec<f64>), EvalError> {
    for item in items {
        if item.score > MAX_PHQ8 {
            return Err(EvalError::ScoreOutOfRange(item.score));
        }
    }
    let pairs: Vec<(String, String)> = items
        .iter()
        .map(|t| (t.id.clone(), t.text.clone()))
        .collect();
    let vectors = embed_texts(provider, &pairs)?;
    let xs = vectors.into_iter().map(|v| v.values).collect();
    let ys = items.iter().map(|t| t.score as f64).collect();
    Ok((xs, ys))
}

fn fit_and_score(
    config: TrainConfig,
    x: &[Vec<f64>],
    y: &[f64],
    test_x: &[Vec<f64>],
    test_y: &[f64],
    lambda: f64,
) -> Result<UtilityRow, EvalError> {
    let model = fit_ridge(x, y, lambda)?;
    let preds: Vec<f64> = test_x
        .iter()
        .map(|row| model.predict(row).clamp(0.0, MAX_PHQ8 as f64))
        .collect();
    Ok(UtilityRow {
        config,
        rmse: rmse(&preds, test_y)?,
        mae: mae(&preds, test_y)?,
        n_train: x.len(),
        n_test: test_x.len(),
    })
}

/// Which two populations a privacy row compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pairing {
    RealVsReal,
    RealVsSynthetic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrivacyReport {
    pub pairing: Pairing,
    pub min_dist: f64,
    pub avg_min_dist: f64,
}

/// Per-query minimum distances, brute force over every base point.
///
/// `exclude_self` skips the same-index pair and is only meaningful when
/// `base` and `query` are the same collection (the RealVsReal row).
pub fn min_distance_report(
    pairing: Pairing,
    base: &[EmbeddingVector],
    query: &[EmbeddingVector],
    exclude_self: bool,
    metric: Metric,
) -> Result<PrivacyReport, EvalError> {
    if base.is_empty() || query.is_empty() {
        return Err(EvalError::EmptySet);
    }
    if exclude_self {
        if base.len() != query.len() {
            return Err(EvalError::DegenerateData(
                "exclude_self requires base and query to be the same collection".into(),
            ));
        }
        if base.len() < 2 {
            return Err(EvalError::EmptySet);
        }
    }
    let dim = base[0].dim;
    for v in base.iter().chain(query) {
        if v.dim != dim {
            return Err(EvalError::DimensionMismatch {
                expected: dim,
                got: v.dim,
            });
        }
    }

    let mut minima = Vec::with_capacity(query.len());
    for (i, q) in query.iter().enumerate() {
        let mut best = f64::INFINITY;
        for (j, b) in base.iter().enumerate() {
            if exclude_self && i == j {
                continue;
            }
            let d = metric.distance(&q.values, &b.values)?;
            if d < best {
                best = d;
            }
        }
        minima.push(best);
    }
    let min_dist = minima.iter().copied().fold(f64::INFINITY, f64::min);
    let avg_min_dist = minima.iter().sum::<f64>() / minima.len() as f64;
    Ok(PrivacyReport {
        pairing,
        min_dist,
        avg_min_dist,
    })
}

/// One dataset's score distribution: 25 bins plus the fraction at or
/// above the depression cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreHistogram {
    pub dataset: String,
    pub bins: Vec<u64>,
    pub depressed_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramReport {
    pub rows: Vec<ScoreHistogram>,
}

impl HistogramReport {
    /// CSV rows `score,dataset,count`, scores 0..=24 per dataset.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("score,dataset,count\n");
        for row in &self.rows {
            for (score, count) in row.bins.iter().enumerate() {
                out.push_str(&format!("{score},{},{count}\n", row.dataset));
            }
        }
        out
    }

    pub fn row(&self, dataset: &str) -> Option<&ScoreHistogram> {
        self.rows.iter().find(|r| r.dataset == dataset)
    }
}

/// Bin each labeled dataset over the PHQ-8 range. Empty datasets are
/// legal and yield all-zero bins with a zero depressed fraction.
pub fn histogram_report(datasets: &[(String, Vec<u8>)]) -> Result<HistogramReport, EvalError> {
    let mut rows = Vec::with_capacity(datasets.len());
    for (name, scores) in datasets {
        let mut bins = vec![0u64; MAX_PHQ8 as usize + 1];
        let mut depressed = 0u64;
        for &s in scores {
            if s > MAX_PHQ8 {
                return Err(EvalError::ScoreOutOfRange(s));
            }
            bins[s as usize] += 1;
            if s >= DEPRESSION_CUTOFF {
                depressed += 1;
            }
        }
        let depressed_fraction = if scores.is_empty() {
            0.0
        } else {
            depressed as f64 / scores.len() as f64
        };
        rows.push(ScoreHistogram {
            dataset: name.clone(),
            bins,
            depressed_fraction,
        });
    }
    Ok(HistogramReport { rows })
}

/// Flatness measure for a histogram: largest bin over smallest bin.
/// All-zero bins give 0; any empty bin alongside a populated one gives
/// infinity.
pub fn max_min_bin_ratio(bins: &[u64]) -> f64 {
    let max = bins.iter().copied().max().unwrap_or(0);
    let min = bins.iter().copied().min().unwrap_or(0);
    if max == 0 {
        0.0
    } else if min == 0 {
        f64::INFINITY
    } else {
        max as f64 / min as f64
    }
}
