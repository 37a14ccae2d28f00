//! Subcommand implementations shared by the `pipeline` binary and the
//! examples: ingest, generate, evaluate, report.
//!
//! Privacy posture: no subcommand prints transcript or summary text to
//! stdout unless the caller passes `show_text`. Counts, scores, and
//! metric values are always fair game.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::client::{ChatClient, ClientError};
use crate::config::{ConfigError, EmbedBackendKind, RunConfig};
use crate::corpus::{
    corpus_stats, load_corpus, score_distribution, CorpusError, InterviewTranscript, Split,
};
use crate::embedding::{embed_texts, EmbeddingError, EmbeddingProvider, EmbeddingVector};
use crate::eval::{
    histogram_report, min_distance_report, pca_2d_opts, select_lambda, utility_experiment,
    EvalError, LabeledText, Pairing, SourceTag,
};
use crate::mock::{MockBehavior, MockChatTransport, TemplateRouter};
use crate::pipeline::{
    load_summaries, load_synthetic, run_generation, summarize_all, write_summaries, PipelineError,
    RunOptions, SummaryPair, SyntheticRecord,
};
use crate::prompt::SamplingStrategy;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_REMOTE: i32 = 4;
pub const EXIT_EVAL: i32 = 5;

/// A subcommand failure carrying the process exit code.
#[derive(Debug)]
pub struct CmdFailure {
    pub exit_code: i32,
    pub message: String,
}

impl CmdFailure {
    pub fn new(exit_code: i32, message: impl Into<String>) -> Self {
        CmdFailure {
            exit_code,
            message: message.into(),
        }
    }

    fn in_axis(self, axis: Axis) -> Self {
        CmdFailure {
            exit_code: self.exit_code,
            message: format!("{axis} axis: {}", self.message),
        }
    }
}

impl fmt::Display for CmdFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<ConfigError> for CmdFailure {
    fn from(e: ConfigError) -> Self {
        CmdFailure::new(EXIT_CONFIG, e.to_string())
    }
}

impl From<CorpusError> for CmdFailure {
    fn from(e: CorpusError) -> Self {
        CmdFailure::new(EXIT_DATA, e.to_string())
    }
}

impl From<ClientError> for CmdFailure {
    fn from(e: ClientError) -> Self {
        let code = match e {
            ClientError::InvalidParams(_) => EXIT_CONFIG,
            _ => EXIT_REMOTE,
        };
        CmdFailure::new(code, e.to_string())
    }
}

impl From<PipelineError> for CmdFailure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::ConfigError(_) | PipelineError::Prompt(_) => {
                CmdFailure::new(EXIT_CONFIG, e.to_string())
            }
            PipelineError::Client(c) => c.into(),
            PipelineError::GenerationFailed { .. }
            | PipelineError::FailureCeiling { .. }
            | PipelineError::ParseError
            | PipelineError::MissingKey { .. } => CmdFailure::new(EXIT_REMOTE, e.to_string()),
            PipelineError::Io { .. }
            | PipelineError::BadRecord { .. }
            | PipelineError::ScoreOutOfRange(_) => CmdFailure::new(EXIT_DATA, e.to_string()),
        }
    }
}

impl From<EmbeddingError> for CmdFailure {
    fn from(e: EmbeddingError) -> Self {
        let code = match e {
            EmbeddingError::TransportError(_) | EmbeddingError::ProtocolError(_) => EXIT_REMOTE,
            EmbeddingError::Io { .. } | EmbeddingError::CacheError { .. } => EXIT_DATA,
            EmbeddingError::InvalidInput(_) => EXIT_CONFIG,
            EmbeddingError::DimensionMismatch { .. } | EmbeddingError::EmptyText { .. } => {
                EXIT_EVAL
            }
        };
        CmdFailure::new(code, e.to_string())
    }
}

impl From<EvalError> for CmdFailure {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Embedding(inner) => inner.into(),
            _ => CmdFailure::new(EXIT_EVAL, e.to_string()),
        }
    }
}

/// The three evaluation axes selectable via `--axes`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axis {
    Utility,
    Fidelity,
    Privacy,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::Utility, Axis::Fidelity, Axis::Privacy];

    pub fn name(self) -> &'static str {
        match self {
            Axis::Utility => "utility",
            Axis::Fidelity => "fidelity",
            Axis::Privacy => "privacy",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "utility" => Ok(Axis::Utility),
            "fidelity" => Ok(Axis::Fidelity),
            "privacy" => Ok(Axis::Privacy),
            other => Err(format!(
                "unknown axis '{other}' (expected utility, fidelity, or privacy)"
            )),
        }
    }
}

/// Parse a comma-separated `--axes` value into a deduplicated, canonically
/// ordered list.
pub fn parse_axes(raw: &str) -> Result<Vec<Axis>, String> {
    let mut axes: Vec<Axis> = raw
        .split(',')
        .filter(|part| !part.trim().is_empty())
        .map(Axis::from_str)
        .collect::<Result<_, _>>()?;
    if axes.is_empty() {
        return Err("at least one axis required".into());
    }
    axes.sort();
    axes.dedup();
    Ok(axes)
}

/// Offline stand-ins for the chat endpoint, selectable via `--mock`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MockKind {
    /// Echo the prompt back (exercises the repair path).
    Echo,
    /// Score-correlated template responses for both pipeline steps.
    Template,
    /// Non-JSON noise (exercises quarantine and the failure ceiling).
    Garbage,
}

impl MockKind {
    pub fn name(self) -> &'static str {
        match self {
            MockKind::Echo => "echo",
            MockKind::Template => "template",
            MockKind::Garbage => "garbage",
        }
    }
}

impl FromStr for MockKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "echo" => Ok(MockKind::Echo),
            "template" => Ok(MockKind::Template),
            "garbage" => Ok(MockKind::Garbage),
            other => Err(format!(
                "unknown mock '{other}' (expected echo, template, or garbage)"
            )),
        }
    }
}

fn build_client(cfg: &RunConfig, mock: Option<MockKind>) -> Result<ChatClient, CmdFailure> {
    let client = match mock {
        None => ChatClient::http(cfg.chat.clone())?,
        Some(MockKind::Echo) => ChatClient::over(
            cfg.chat.clone(),
            Box::new(MockChatTransport::new(MockBehavior::Echo)),
            true,
        )?,
        Some(MockKind::Template) => {
            ChatClient::over(cfg.chat.clone(), Box::new(TemplateRouter), true)?
        }
        Some(MockKind::Garbage) => ChatClient::over(
            cfg.chat.clone(),
            Box::new(MockChatTransport::new(MockBehavior::Garbage)),
            true,
        )?,
    };
    Ok(client.allow_token_escape(cfg.generation.allow_token_escape))
}

fn build_provider(cfg: &RunConfig) -> Result<EmbeddingProvider, CmdFailure> {
    let provider = match cfg.embedding.backend {
        EmbedBackendKind::Hashing => EmbeddingProvider::hashing(cfg.embedding.dim)?,
        EmbedBackendKind::Remote => EmbeddingProvider::remote(&cfg.embedding.endpoint),
    };
    let cache = match (&cfg.embedding.cache_file, cfg.embedding.backend) {
        (Some(path), _) => Some(path.clone()),
        // Remote embeddings cost money and time; cache them by default.
        (None, EmbedBackendKind::Remote) => Some(cfg.output_dir.join("embedding_cache.jsonl")),
        (None, EmbedBackendKind::Hashing) => None,
    };
    Ok(match cache {
        Some(path) => provider.with_cache(path),
        None => provider,
    })
}

fn ensure_output_dir(cfg: &RunConfig) -> Result<(), CmdFailure> {
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| {
        CmdFailure::new(
            EXIT_DATA,
            format!("cannot create output dir {}: {e}", cfg.output_dir.display()),
        )
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), CmdFailure> {
    std::fs::write(path, text)
        .map_err(|e| CmdFailure::new(EXIT_DATA, format!("cannot write {}: {e}", path.display())))
}

fn write_json(path: &Path, value: &Value) -> Result<(), CmdFailure> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    write_text(path, &text)
}

fn read_json(path: &Path) -> Result<Value, CmdFailure> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CmdFailure::new(EXIT_DATA, format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&raw)
        .map_err(|e| CmdFailure::new(EXIT_DATA, format!("cannot parse {}: {e}", path.display())))
}

fn split_scores(corpus: &[InterviewTranscript], split: Split) -> Vec<u8> {
    corpus
        .iter()
        .filter(|t| t.split == split)
        .map(|t| t.phq8)
        .collect()
}

/// Validate and summarize the corpus; write `histogram.csv` (real splits)
/// and `ingest_report.json`.
pub fn cmd_ingest(cfg: &RunConfig) -> Result<(), CmdFailure> {
    let corpus = load_corpus(&cfg.corpus_dir, &cfg.labels_file, &cfg.splits_file)?;
    let stats = corpus_stats(&corpus)?;
    let dist = score_distribution(&corpus);
    ensure_output_dir(cfg)?;

    let datasets: Vec<(String, Vec<u8>)> = Split::ALL
        .iter()
        .map(|&s| (s.name().to_string(), split_scores(&corpus, s)))
        .collect();
    let histogram = histogram_report(&datasets)?;
    write_text(&cfg.output_dir.join("histogram.csv"), &histogram.to_csv())?;

    let split_counts: BTreeMap<&str, usize> = Split::ALL
        .iter()
        .map(|&s| (s.name(), corpus.iter().filter(|t| t.split == s).count()))
        .collect();
    let report = json!({
        "config_hash": cfg.snapshot_hash(),
        "sessions": corpus.len(),
        "splits": split_counts,
        "depressed_count": dist.depressed_count,
        "avg_words": stats.avg_words,
        "max_words": stats.max_words,
    });
    write_json(&cfg.output_dir.join("ingest_report.json"), &report)?;

    println!(
        "ingest: {} sessions (train {}, dev {}, test {}), {} depressed",
        corpus.len(),
        split_counts["train"],
        split_counts["dev"],
        split_counts["test"],
        dist.depressed_count,
    );
    println!(
        "ingest: avg {:.1} words, max {} words; wrote histogram.csv, ingest_report.json",
        stats.avg_words, stats.max_words,
    );
    Ok(())
}

/// Run the two-step generation over the train split, then summarize the
/// dev and test splits for later evaluation.
pub fn cmd_generate(
    cfg: &RunConfig,
    mock: Option<MockKind>,
    show_text: bool,
) -> Result<(), CmdFailure> {
    let corpus = load_corpus(&cfg.corpus_dir, &cfg.labels_file, &cfg.splits_file)?;
    let train: Vec<InterviewTranscript> = corpus
        .iter()
        .filter(|t| t.split == Split::Train)
        .cloned()
        .collect();
    let held_out: Vec<InterviewTranscript> = corpus
        .iter()
        .filter(|t| t.split != Split::Train)
        .cloned()
        .collect();
    let observed = score_distribution(&corpus);

    let client = build_client(cfg, mock)?;
    let strategy = SamplingStrategy {
        mode: cfg.sampling,
        seed: cfg.seed,
    };
    let opts = RunOptions {
        out_dir: cfg.output_dir.clone(),
        run_id: cfg.run_id(),
        config_snapshot: serde_json::to_value(cfg).expect("config serializes"),
        mock_label: mock.map(|m| m.name().to_string()),
        failure_ceiling: cfg.generation.failure_ceiling,
        concurrency: cfg.generation.concurrency,
    };
    let output = run_generation(
        &train,
        cfg.variants_per_source,
        strategy,
        &client,
        &cfg.generation.params,
        Some(&observed),
        &opts,
    )?;

    // Dev/test summaries feed utility evaluation; a partial split would
    // silently shift the metric denominators, so any failure is fatal.
    let eval_pairs = summarize_all(
        &held_out,
        &client,
        &cfg.generation.params,
        cfg.generation.concurrency,
    )?;
    write_summaries(&cfg.output_dir.join("eval_summaries.jsonl"), &eval_pairs)
        .map_err(CmdFailure::from)?;

    let counts = &output.run.counts;
    println!(
        "generate: {} ({} sources x {}): {} records, {} repaired, {} quarantined",
        output.run.run_id,
        counts.sources,
        counts.variants_per_source,
        counts.produced,
        counts.repaired,
        counts.failed,
    );
    println!(
        "generate: {} held-out sessions summarized for evaluation",
        eval_pairs.len()
    );
    if show_text {
        for r in &output.records {
            println!("{} [score {}]", r.record_id, r.target_phq8);
            println!("  synopsis: {}", r.synopsis);
            println!("  sentiment: {}", r.sentiment);
        }
    }
    Ok(())
}

struct EvalInputs {
    real_train: Vec<LabeledText>,
    synthetic: Vec<LabeledText>,
    dev: Vec<LabeledText>,
    test: Vec<LabeledText>,
    records: Vec<SyntheticRecord>,
}

fn load_eval_inputs(cfg: &RunConfig) -> Result<EvalInputs, CmdFailure> {
    let dir = &cfg.output_dir;
    for file in ["summaries.jsonl", "synthetic.jsonl", "eval_summaries.jsonl"] {
        if !dir.join(file).is_file() {
            return Err(CmdFailure::new(
                EXIT_DATA,
                format!(
                    "{} not found in {}; run generate first",
                    file,
                    dir.display()
                ),
            ));
        }
    }
    let summaries = load_summaries(&dir.join("summaries.jsonl"))?;
    let records = load_synthetic(&dir.join("synthetic.jsonl"))?;
    let eval_pairs = load_summaries(&dir.join("eval_summaries.jsonl"))?;

    let corpus = load_corpus(&cfg.corpus_dir, &cfg.labels_file, &cfg.splits_file)?;
    let by_session: BTreeMap<&str, (u8, Split)> = corpus
        .iter()
        .map(|t| (t.session_id.as_str(), (t.phq8, t.split)))
        .collect();
    let labeled = |pair: &SummaryPair| -> Result<(LabeledText, Split), CmdFailure> {
        let (score, split) = by_session.get(pair.session_id.as_str()).ok_or_else(|| {
            CmdFailure::new(
                EXIT_DATA,
                format!(
                    "session {} in summaries has no corpus label",
                    pair.session_id
                ),
            )
        })?;
        let text = cfg.evaluation.embed_source.of_pair(pair);
        Ok((
            LabeledText::new(format!("real-{}", pair.session_id), text, *score),
            *split,
        ))
    };

    let mut real_train = Vec::with_capacity(summaries.len());
    for pair in &summaries {
        real_train.push(labeled(pair)?.0);
    }
    let mut dev = Vec::new();
    let mut test = Vec::new();
    for pair in &eval_pairs {
        let (item, split) = labeled(pair)?;
        match split {
            Split::Dev => dev.push(item),
            Split::Test => test.push(item),
            Split::Train => {
                return Err(CmdFailure::new(
                    EXIT_DATA,
                    format!(
                        "session {} in eval_summaries belongs to the train split",
                        pair.session_id
                    ),
                ))
            }
        }
    }
    let synthetic = records
        .iter()
        .map(|r| {
            LabeledText::new(
                r.record_id.clone(),
                cfg.evaluation.embed_source.of_record(r),
                r.target_phq8,
            )
        })
        .collect();
    Ok(EvalInputs {
        real_train,
        synthetic,
        dev,
        test,
        records,
    })
}

fn embed_labeled(
    provider: &EmbeddingProvider,
    items: &[LabeledText],
) -> Result<Vec<EmbeddingVector>, CmdFailure> {
    let pairs: Vec<(String, String)> = items
        .iter()
        .map(|t| (t.id.clone(), t.text.clone()))
        .collect();
    embed_texts(provider, &pairs).map_err(CmdFailure::from)
}

/// Run the requested evaluation axes over an existing generation run and
/// write their report files. The score histogram CSV (real splits,
/// synthetic, combined) is refreshed on every invocation.
pub fn cmd_evaluate(cfg: &RunConfig, axes: &[Axis]) -> Result<(), CmdFailure> {
    let inputs = load_eval_inputs(cfg)?;
    let provider = build_provider(cfg)?;
    let config_hash = cfg.snapshot_hash();
    ensure_output_dir(cfg)?;

    let corpus = load_corpus(&cfg.corpus_dir, &cfg.labels_file, &cfg.splits_file)?;
    let train_scores = split_scores(&corpus, Split::Train);
    let synthetic_scores: Vec<u8> = inputs.records.iter().map(|r| r.target_phq8).collect();
    let mut combined = train_scores.clone();
    combined.extend(&synthetic_scores);
    let datasets: Vec<(String, Vec<u8>)> = vec![
        ("train".into(), train_scores),
        ("dev".into(), split_scores(&corpus, Split::Dev)),
        ("test".into(), split_scores(&corpus, Split::Test)),
        ("synthetic".into(), synthetic_scores),
        ("combined".into(), combined),
    ];
    let histogram = histogram_report(&datasets).map_err(CmdFailure::from)?;
    write_text(&cfg.output_dir.join("histogram.csv"), &histogram.to_csv())?;

    // Fidelity and privacy share one embedded point set.
    let mut shared_vectors: Option<(Vec<EmbeddingVector>, Vec<EmbeddingVector>)> = None;
    let mut embedded = |provider: &EmbeddingProvider,
                        inputs: &EvalInputs|
     -> Result<(Vec<EmbeddingVector>, Vec<EmbeddingVector>), CmdFailure> {
        if let Some(pair) = &shared_vectors {
            return Ok(pair.clone());
        }
        let real = embed_labeled(provider, &inputs.real_train)?;
        let syn = embed_labeled(provider, &inputs.synthetic)?;
        shared_vectors = Some((real.clone(), syn.clone()));
        Ok((real, syn))
    };

    for &axis in axes {
        match axis {
            Axis::Utility => {
                let (lambda, trace) = match &cfg.evaluation.lambda_grid {
                    Some(grid) => {
                        if inputs.dev.is_empty() {
                            return Err(CmdFailure::new(
                                EXIT_DATA,
                                "utility axis: lambda_grid selection needs a dev split",
                            ));
                        }
                        let (chosen, trace) =
                            select_lambda(&inputs.real_train, &inputs.dev, &provider, grid)
                                .map_err(|e| CmdFailure::from(e).in_axis(axis))?;
                        (chosen, Some(trace))
                    }
                    None => (cfg.evaluation.lambda, None),
                };
                let report = utility_experiment(
                    &inputs.real_train,
                    &inputs.synthetic,
                    &inputs.test,
                    &provider,
                    lambda,
                )
                .map_err(|e| CmdFailure::from(e).in_axis(axis))?;
                let envelope = json!({
                    "config_hash": config_hash,
                    "lambda_trace": trace.map(|t| {
                        t.into_iter()
                            .map(|(l, r)| json!({"lambda": l, "dev_rmse": r}))
                            .collect::<Vec<_>>()
                    }),
                    "report": report,
                });
                write_json(&cfg.output_dir.join("utility_report.json"), &envelope)?;
                for row in &report.rows {
                    println!(
                        "utility: {:?} rmse {:.4} mae {:.4} (n_train {})",
                        row.config, row.rmse, row.mae, row.n_train
                    );
                }
            }
            Axis::Fidelity => {
                let (real, syn) = embedded(&provider, &inputs)?;
                let mut vectors = real;
                let mut tags = vec![SourceTag::Real; vectors.len()];
                tags.resize(tags.len() + syn.len(), SourceTag::Synthetic);
                vectors.extend(syn);
                let report = pca_2d_opts(&vectors, &tags, cfg.evaluation.pca_fit)
                    .map_err(|e| CmdFailure::from(e).in_axis(axis))?;
                let envelope = json!({
                    "config_hash": config_hash,
                    "fit": cfg.evaluation.pca_fit,
                    "report": report,
                });
                write_json(&cfg.output_dir.join("fidelity_report.json"), &envelope)?;
                write_text(
                    &cfg.output_dir.join("fidelity_points.csv"),
                    &report.points_csv(),
                )?;
                println!(
                    "fidelity: {} points, explained variance {:.4} + {:.4}",
                    report.points.len(),
                    report.explained_variance_ratio[0],
                    report.explained_variance_ratio[1],
                );
            }
            Axis::Privacy => {
                let (real, syn) = embedded(&provider, &inputs)?;
                let metric = cfg.evaluation.metric;
                let mut rows = Vec::with_capacity(2);
                rows.push(
                    min_distance_report(Pairing::RealVsReal, &real, &real, true, metric)
                        .map_err(|e| CmdFailure::from(e).in_axis(axis))?,
                );
                if !syn.is_empty() {
                    rows.push(
                        min_distance_report(Pairing::RealVsSynthetic, &real, &syn, false, metric)
                            .map_err(|e| CmdFailure::from(e).in_axis(axis))?,
                    );
                }
                let envelope = json!({
                    "config_hash": config_hash,
                    "metric": metric,
                    "rows": rows,
                });
                write_json(&cfg.output_dir.join("privacy_report.json"), &envelope)?;
                for row in &rows {
                    println!(
                        "privacy: {:?} min {:.4} avg-min {:.4} ({})",
                        row.pairing, row.min_dist, row.avg_min_dist, metric
                    );
                }
            }
        }
    }
    Ok(())
}

/// Print a consolidated view of whatever artifacts the output directory
/// holds. Fails when none are present.
pub fn cmd_report(cfg: &RunConfig) -> Result<(), CmdFailure> {
    let dir = &cfg.output_dir;
    let mut found = false;

    let run_path = dir.join("run.json");
    if run_path.is_file() {
        found = true;
        let run = read_json(&run_path)?;
        println!(
            "run {}: seed {}, {} records from {} sources ({} repaired, {} failed)",
            run["run_id"].as_str().unwrap_or("?"),
            run["seed"],
            run["counts"]["produced"],
            run["counts"]["sources"],
            run["counts"]["repaired"],
            run["counts"]["failed"],
        );
        if let Some(mock) = run["mock"].as_str() {
            println!("  mock transport: {mock}");
        }
    }

    let ingest_path = dir.join("ingest_report.json");
    if ingest_path.is_file() {
        found = true;
        let ingest = read_json(&ingest_path)?;
        println!(
            "corpus: {} sessions, {} depressed, avg {} words",
            ingest["sessions"], ingest["depressed_count"], ingest["avg_words"],
        );
    }

    let utility_path = dir.join("utility_report.json");
    if utility_path.is_file() {
        found = true;
        let utility = read_json(&utility_path)?;
        let lambda = &utility["report"]["lambda"];
        println!("utility (lambda {lambda}):");
        if let Some(rows) = utility["report"]["rows"].as_array() {
            for row in rows {
                println!(
                    "  {}: rmse {} mae {}",
                    row["config"].as_str().unwrap_or("?"),
                    row["rmse"],
                    row["mae"],
                );
            }
        }
    }

    let fidelity_path = dir.join("fidelity_report.json");
    if fidelity_path.is_file() {
        found = true;
        let fidelity = read_json(&fidelity_path)?;
        let ratios = &fidelity["report"]["explained_variance_ratio"];
        println!(
            "fidelity: {} points, explained variance {} + {}",
            fidelity["report"]["points"]
                .as_array()
                .map(|a| a.len())
                .unwrap_or(0),
            ratios[0],
            ratios[1],
        );
    }

    let privacy_path = dir.join("privacy_report.json");
    if privacy_path.is_file() {
        found = true;
        let privacy = read_json(&privacy_path)?;
        println!("privacy ({}):", privacy["metric"].as_str().unwrap_or("?"));
        if let Some(rows) = privacy["rows"].as_array() {
            for row in rows {
                println!(
                    "  {}: min {} avg-min {}",
                    row["pairing"].as_str().unwrap_or("?"),
                    row["min_dist"],
                    row["avg_min_dist"],
                );
            }
        }
    }

    if dir.join("histogram.csv").is_file() {
        found = true;
        println!("histogram.csv present (score,dataset,count)");
    }

    if !found {
        return Err(CmdFailure::new(
            EXIT_DATA,
            format!(
                "no artifacts found in {}; run ingest, generate, or evaluate first",
                dir.display()
            ),
        ));
    }
    Ok(())
}
