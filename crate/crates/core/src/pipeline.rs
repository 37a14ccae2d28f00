//! Two-step generation pipeline: distill transcripts into summary pairs,
//! then rewrite each pair at sampled target scores, with output
//! validation, bounded repair, quarantine of failures, and provenance
//! persisted next to the data.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::sync::OnceLock;
use std::time::{SystemTime, UNIX_EPOCH};

use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::client::{ChatClient, ClientError, GenerationParams};
use crate::corpus::{InterviewTranscript, ScoreDistribution, MAX_PHQ8};
use crate::prompt::{
    render_summary_prompt, render_synthesis_prompt, sample_target_scores, severity_description,
    ItemKind, PromptError, SamplingStrategy, SUMMARY_PERSONA, SYNTHESIS_PERSONA,
};

/// Re-prompt rounds after the initial attempt before giving up on an item.
pub const REPAIR_ROUNDS: u32 = 2;

/// Default abort threshold: fail the run when more than this fraction of
/// records could not be generated.
pub const DEFAULT_FAILURE_CEILING: f64 = 0.10;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("generation failed for {item:?}: {cause}")]
    GenerationFailed {
        item: ItemKind,
        cause: String,
        raw: Option<String>,
    },
    #[error("target PHQ-8 score {0} outside 0..=24")]
    ScoreOutOfRange(u8),
    #[error("no parsable JSON object in model output")]
    ParseError,
    #[error("model output JSON lacks key {key:?}")]
    MissingKey { key: String },
    #[error("configuration error: {0}")]
    ConfigError(String),
    #[error("{failed} of {total} records failed, above the {ceiling} ceiling")]
    FailureCeiling {
        failed: usize,
        total: usize,
        ceiling: f64,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("{path} line {line}: {message}")]
    BadRecord {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

/// Output-contract breach found in generated text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StyleViolation {
    /// A first-person pronoun token, as it appeared in the text.
    FirstPerson(String),
    /// Embedded newline; outputs must be single-line.
    MultiLine,
}

impl std::fmt::Display for StyleViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StyleViolation::FirstPerson(word) => write!(f, "first-person pronoun {word:?}"),
            StyleViolation::MultiLine => write!(f, "embedded newline"),
        }
    }
}

/// Per-item-kind fields of the generation metadata.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerItem<T> {
    pub synopsis: T,
    pub sentiment: T,
}

/// Provenance attached to every generated artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationMeta {
    pub model_name: String,
    pub params: GenerationParams,
    /// Unix milliseconds at completion; 0 under deterministic transports.
    pub completed_unix_ms: u64,
    /// Total request attempts per item, including transport retries and
    /// repair rounds.
    pub attempts: PerItem<u32>,
    /// Whether the item needed JSON repair or a corrective re-prompt.
    pub repaired: PerItem<bool>,
    pub latency_ms: u64,
    pub repetition_penalty_omitted: bool,
}

/// Step-1 output: distilled synopsis and sentiment for one session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryPair {
    pub session_id: String,
    pub synopsis: String,
    pub sentiment: String,
    pub meta: GenerationMeta,
}

/// Step-2 output: a synthetic pair rewritten at a target score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticRecord {
    pub record_id: String,
    pub source_session_id: String,
    pub target_phq8: u8,
    pub severity_text: String,
    pub synopsis: String,
    pub sentiment: String,
    pub meta: GenerationMeta,
}

/// A record that could not be generated, kept for audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuarantineEntry {
    pub record_id: String,
    pub source_session_id: String,
    /// Which step failed: "summarize" or "synthesize".
    pub stage: String,
    pub item: String,
    pub target_phq8: Option<u8>,
    pub error: String,
    pub raw_output: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunCounts {
    pub sources: usize,
    pub variants_per_source: u32,
    pub produced: usize,
    pub repaired: usize,
    pub failed: usize,
}

/// Manifest describing one generation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineRun {
    pub run_id: String,
    pub seed: u64,
    pub counts: RunCounts,
    pub config: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mock: Option<String>,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
}

/// Everything a run produced, also persisted under the output directory.
#[derive(Debug)]
pub struct GenerationOutput {
    pub summaries: Vec<SummaryPair>,
    pub records: Vec<SyntheticRecord>,
    pub quarantine: Vec<QuarantineEntry>,
    pub run: PipelineRun,
}

/// Knobs for [`run_generation`] beyond the core inputs.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub run_id: String,
    pub config_snapshot: Value,
    pub mock_label: Option<String>,
    pub failure_ceiling: f64,
    pub concurrency: usize,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        RunOptions {
            out_dir: out_dir.into(),
            run_id: "run".into(),
            config_snapshot: Value::Null,
            mock_label: None,
            failure_ceiling: DEFAULT_FAILURE_CEILING,
            concurrency: 4,
        }
    }
}

/// Parse a model output against the compact-JSON contract.
///
/// Strict path: the raw text is exactly one JSON object holding a string
/// at `key`. Repair path: take the first balanced `{…}` span that parses
/// as an object, ignoring surrounding chatter; a successful repair
/// returns `true` in the second slot.
pub fn parse_model_json(raw: &str, key: &str) -> Result<(String, bool), PipelineError> {
    if let Ok(Value::Object(map)) = serde_json::from_str::<Value>(raw.trim()) {
        return match map.get(key) {
            Some(Value::String(s)) => Ok((s.clone(), false)),
            Some(_) => Err(PipelineError::ParseError),
            None => Err(PipelineError::MissingKey {
                key: key.to_string(),
            }),
        };
    }
    for start in raw
        .char_indices()
        .filter(|&(_, c)| c == '{')
        .map(|(i, _)| i)
    {
        let Some(span) = balanced_object_span(&raw[start..]) else {
            continue;
        };
        if let Ok(Value::Object(map)) = serde_json::from_str::<Value>(span) {
            return match map.get(key) {
                Some(Value::String(s)) => Ok((s.clone(), true)),
                Some(_) => Err(PipelineError::ParseError),
                None => Err(PipelineError::MissingKey {
                    key: key.to_string(),
                }),
            };
        }
    }
    Err(PipelineError::ParseError)
}

/// First balanced `{…}` prefix of `text`, tracking JSON string quoting so
/// braces inside values don't end the span.
fn balanced_object_span(text: &str) -> Option<&str> {
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (i, c) in text.char_indices() {
        if in_string {
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                in_string = false;
            }
            continue;
        }
        match c {
            '"' => in_string = true,
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(&text[..i + c.len_utf8()]);
                }
            }
            _ => {}
        }
    }
    None
}

fn pronoun_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\b(i|me|my|mine|we|our)\b").unwrap())
}

/// Check generated text against the appendix style rules: no first-person
/// pronouns, single line. Violations are data, not errors.
pub fn validate_style(text: &str) -> Vec<StyleViolation> {
    let mut violations = Vec::new();
    let mut seen = BTreeSet::new();
    for m in pronoun_regex().find_iter(text) {
        if seen.insert(m.as_str().to_ascii_lowercase()) {
            violations.push(StyleViolation::FirstPerson(m.as_str().to_string()));
        }
    }
    if text.contains('\n') {
        violations.push(StyleViolation::MultiLine);
    }
    violations
}

/// `synopsis + " " + sentiment`, the regressor input text.
pub fn concat_input(synopsis: &str, sentiment: &str) -> String {
    assert!(
        !synopsis.is_empty() && !sentiment.is_empty(),
        "concat_input needs non-empty parts"
    );
    format!("{synopsis} {sentiment}")
}

struct ItemOutcome {
    text: String,
    attempts: u32,
    repaired: bool,
    latency_ms: u64,
    penalty_omitted: bool,
}

/// One validated item generation with up to [`REPAIR_ROUNDS`] corrective
/// re-prompts on parse or style failures.
fn generate_item(
    client: &ChatClient,
    persona: &str,
    base_prompt: &str,
    params: &GenerationParams,
    item: ItemKind,
) -> Result<ItemOutcome, PipelineError> {
    let key = item.item_name();
    let mut attempts = 0u32;
    let mut latency_ms = 0u64;
    let mut penalty_omitted = false;
    let mut prompt = base_prompt.to_string();
    let mut last_raw: Option<String> = None;
    let mut last_cause = String::new();

    for round in 0..=REPAIR_ROUNDS {
        let exchange = client.complete(persona, &prompt, params)?;
        attempts += exchange.attempt_count;
        latency_ms += exchange.latency_ms;
        penalty_omitted |= exchange.repetition_penalty_omitted;
        last_raw = Some(exchange.response_text.clone());

        let correction = match parse_model_json(&exchange.response_text, key) {
            Ok((text, parse_repaired)) => {
                let violations = validate_style(&text);
                if violations.is_empty() {
                    if text.trim().is_empty() {
                        last_cause = "empty item text".into();
                        format!(
                            "Correction: the previous output had an empty {key}; produce a \
                             non-empty {key} value."
                        )
                    } else {
                        return Ok(ItemOutcome {
                            text,
                            attempts,
                            repaired: parse_repaired || round > 0,
                            latency_ms,
                            penalty_omitted,
                        });
                    }
                } else {
                    let listed = violations
                        .iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join(", ");
                    last_cause = format!("style violations: {listed}");
                    format!(
                        "Correction: the previous output broke the style rules ({listed}); \
                         rewrite the {key} in third person on a single line."
                    )
                }
            }
            Err(e @ (PipelineError::ParseError | PipelineError::MissingKey { .. })) => {
                last_cause = e.to_string();
                format!(
                    "Correction: the previous output was not a single compact JSON object; \
                     output exactly {{\"{key}\":\"...\"}} on one line with no other text."
                )
            }
            Err(other) => return Err(other),
        };
        prompt = format!("{base_prompt}\n{correction}");
    }

    Err(PipelineError::GenerationFailed {
        item,
        cause: last_cause,
        raw: last_raw,
    })
}

fn now_ms(client: &ChatClient) -> u64 {
    if client.is_deterministic() {
        0
    } else {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0)
    }
}

/// Step 1: two independent completions distill a transcript into its
/// synopsis and sentiment.
pub fn summarize(
    t: &InterviewTranscript,
    client: &ChatClient,
    params: &GenerationParams,
) -> Result<SummaryPair, PipelineError> {
    let transcript_text = t.participant_text();
    let mut outcomes = Vec::with_capacity(2);
    for item in ItemKind::ALL {
        let prompt = render_summary_prompt(item, &transcript_text)?;
        outcomes.push(generate_item(
            client,
            SUMMARY_PERSONA,
            &prompt,
            params,
            item,
        )?);
    }
    let (synopsis, sentiment) = (&outcomes[0], &outcomes[1]);
    Ok(SummaryPair {
        session_id: t.session_id.clone(),
        synopsis: synopsis.text.clone(),
        sentiment: sentiment.text.clone(),
        meta: GenerationMeta {
            model_name: client.model_name().to_string(),
            params: params.clone(),
            completed_unix_ms: now_ms(client),
            attempts: PerItem {
                synopsis: synopsis.attempts,
                sentiment: sentiment.attempts,
            },
            repaired: PerItem {
                synopsis: synopsis.repaired,
                sentiment: sentiment.repaired,
            },
            latency_ms: synopsis.latency_ms + sentiment.latency_ms,
            repetition_penalty_omitted: synopsis.penalty_omitted || sentiment.penalty_omitted,
        },
    })
}

/// Step 2: rewrite a summary pair at `target`, item by item.
pub fn synthesize(
    pair: &SummaryPair,
    target: u8,
    client: &ChatClient,
    params: &GenerationParams,
    record_id: impl Into<String>,
) -> Result<SyntheticRecord, PipelineError> {
    if target > MAX_PHQ8 {
        return Err(PipelineError::ScoreOutOfRange(target));
    }
    let severity = severity_description(target)?;
    let mut outcomes = Vec::with_capacity(2);
    for item in ItemKind::ALL {
        let og_value = match item {
            ItemKind::Synopsis => &pair.synopsis,
            ItemKind::Sentiment => &pair.sentiment,
        };
        let prompt = render_synthesis_prompt(item, og_value, target)?;
        outcomes.push(generate_item(
            client,
            SYNTHESIS_PERSONA,
            &prompt,
            params,
            item,
        )?);
    }
    let (synopsis, sentiment) = (&outcomes[0], &outcomes[1]);
    Ok(SyntheticRecord {
        record_id: record_id.into(),
        source_session_id: pair.session_id.clone(),
        target_phq8: target,
        severity_text: severity.to_string(),
        synopsis: synopsis.text.clone(),
        sentiment: sentiment.text.clone(),
        meta: GenerationMeta {
            model_name: client.model_name().to_string(),
            params: params.clone(),
            completed_unix_ms: now_ms(client),
            attempts: PerItem {
                synopsis: synopsis.attempts,
                sentiment: sentiment.attempts,
            },
            repaired: PerItem {
                synopsis: synopsis.repaired,
                sentiment: sentiment.repaired,
            },
            latency_ms: synopsis.latency_ms + sentiment.latency_ms,
            repetition_penalty_omitted: synopsis.penalty_omitted || sentiment.penalty_omitted,
        },
    })
}

struct SourceOutcome {
    summary: Option<SummaryPair>,
    records: Vec<SyntheticRecord>,
    quarantine: Vec<QuarantineEntry>,
}

fn process_source(
    t: &InterviewTranscript,
    scores: &[u8],
    client: &ChatClient,
    params: &GenerationParams,
) -> SourceOutcome {
    let summary = match summarize(t, client, params) {
        Ok(pair) => pair,
        Err(e) => {
            let (item, raw) = failure_parts(&e);
            let quarantine = scores
                .iter()
                .enumerate()
                .map(|(j, &score)| QuarantineEntry {
                    record_id: format!("syn-{}-{}", t.session_id, j),
                    source_session_id: t.session_id.clone(),
                    stage: "summarize".into(),
                    item: item.clone(),
                    target_phq8: Some(score),
                    error: e.to_string(),
                    raw_output: raw.clone(),
                })
                .collect();
            return SourceOutcome {
                summary: None,
                records: Vec::new(),
                quarantine,
            };
        }
    };

    let mut records = Vec::with_capacity(scores.len());
    let mut quarantine = Vec::new();
    for (j, &score) in scores.iter().enumerate() {
        let record_id = format!("syn-{}-{}", t.session_id, j);
        match synthesize(&summary, score, client, params, &record_id) {
            Ok(record) => records.push(record),
            Err(e) => {
                let (item, raw) = failure_parts(&e);
                quarantine.push(QuarantineEntry {
                    record_id,
                    source_session_id: t.session_id.clone(),
                    stage: "synthesize".into(),
                    item,
                    target_phq8: Some(score),
                    error: e.to_string(),
                    raw_output: raw,
                });
            }
        }
    }
    SourceOutcome {
        summary: Some(summary),
        records,
        quarantine,
    }
}

fn failure_parts(e: &PipelineError) -> (String, Option<String>) {
    match e {
        PipelineError::GenerationFailed { item, raw, .. } => {
            (item.item_name().to_string(), raw.clone())
        }
        _ => ("unknown".into(), None),
    }
}

/// Run the full two-step pipeline over a train split: one summary pair
/// per source, `k` synthetic records per source at sampled target scores.
///
/// All artifacts (summaries, records, quarantine, manifest) are persisted
/// under `opts.out_dir` before the failure ceiling is evaluated, so a
/// failing run still leaves its evidence on disk.
pub fn run_generation(
    train: &[InterviewTranscript],
    k: u32,
    strategy: SamplingStrategy,
    client: &ChatClient,
    params: &GenerationParams,
    observed: Option<&ScoreDistribution>,
    opts: &RunOptions,
) -> Result<GenerationOutput, PipelineError> {
    if train.is_empty() {
        return Err(PipelineError::ConfigError("train split is empty".into()));
    }
    if k == 0 {
        return Err(PipelineError::ConfigError(
            "variants_per_source must be at least 1".into(),
        ));
    }
    params.validate(true).map_err(PipelineError::Client)?;

    let started = now_ms(client);
    let total = train.len() * k as usize;
    let scores = sample_target_scores(total, strategy, observed)?;

    let next = Mutex::new(0usize);
    let collected: Mutex<Vec<(usize, SourceOutcome)>> = Mutex::new(Vec::with_capacity(train.len()));
    let workers = opts.concurrency.clamp(1, train.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = {
                    let mut guard = next.lock().unwrap();
                    if *guard >= train.len() {
                        break;
                    }
                    let i = *guard;
                    *guard += 1;
                    i
                };
                let slice = &scores[idx * k as usize..(idx + 1) * k as usize];
                let outcome = process_source(&train[idx], slice, client, params);
                collected.lock().unwrap().push((idx, outcome));
            });
        }
    });

    let mut outcomes = collected.into_inner().unwrap();
    outcomes.sort_by_key(|(idx, _)| *idx);

    let mut summaries = Vec::new();
    let mut records = Vec::new();
    let mut quarantine = Vec::new();
    for (_, outcome) in outcomes {
        summaries.extend(outcome.summary);
        records.extend(outcome.records);
        quarantine.extend(outcome.quarantine);
    }

    let produced = records.len();
    let failed = quarantine.len();
    debug_assert_eq!(produced + failed, total);
    let repaired = records
        .iter()
        .filter(|r| r.meta.repaired.synopsis || r.meta.repaired.sentiment)
        .count();

    let run = PipelineRun {
        run_id: opts.run_id.clone(),
        seed: strategy.seed,
        counts: RunCounts {
            sources: train.len(),
            variants_per_source: k,
            produced,
            repaired,
            failed,
        },
        config: opts.config_snapshot.clone(),
        mock: opts.mock_label.clone(),
        started_unix_ms: started,
        finished_unix_ms: now_ms(client),
    };

    let output = GenerationOutput {
        summaries,
        records,
        quarantine,
        run,
    };
    persist_run(&output, &opts.out_dir)?;

    if total > 0 && failed as f64 / total as f64 > opts.failure_ceiling {
        return Err(PipelineError::FailureCeiling {
            failed,
            total,
            ceiling: opts.failure_ceiling,
        });
    }
    Ok(output)
}

/// Summarize every transcript, in input order, using up to `concurrency`
/// workers. Unlike [`run_generation`] this is all-or-nothing: evaluation
/// needs the complete split, so the first failure (by input order) wins.
pub fn summarize_all(
    transcripts: &[InterviewTranscript],
    client: &ChatClient,
    params: &GenerationParams,
    concurrency: usize,
) -> Result<Vec<SummaryPair>, PipelineError> {
    if transcripts.is_empty() {
        return Ok(Vec::new());
    }
    let next = Mutex::new(0usize);
    let collected: Mutex<Vec<(usize, Result<SummaryPair, PipelineError>)>> =
        Mutex::new(Vec::with_capacity(transcripts.len()));
    let workers = concurrency.clamp(1, transcripts.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = {
                    let mut guard = next.lock().unwrap();
                    if *guard >= transcripts.len() {
                        break;
                    }
                    let i = *guard;
                    *guard += 1;
                    i
                };
                let outcome = summarize(&transcripts[idx], client, params);
                collected.lock().unwrap().push((idx, outcome));
            });
        }
    });
    let mut outcomes = collected.into_inner().unwrap();
    outcomes.sort_by_key(|(idx, _)| *idx);
    outcomes.into_iter().map(|(_, outcome)| outcome).collect()
}

/// Write a summaries file (JSONL, UTF-8, LF) at `path`.
pub fn write_summaries(path: &Path, items: &[SummaryPair]) -> Result<(), PipelineError> {
    write_jsonl(path, items)
}

/// Write `summaries.jsonl`, `synthetic.jsonl`, `quarantine.jsonl`, and
/// `run.json` (UTF-8, LF) under `dir`.
pub fn persist_run(output: &GenerationOutput, dir: &Path) -> Result<(), PipelineError> {
    std::fs::create_dir_all(dir).map_err(|source| PipelineError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    write_jsonl(&dir.join("summaries.jsonl"), &output.summaries)?;
    write_jsonl(&dir.join("synthetic.jsonl"), &output.records)?;
    write_jsonl(&dir.join("quarantine.jsonl"), &output.quarantine)?;
    let run_path = dir.join("run.json");
    let mut text = serde_json::to_string_pretty(&output.run).expect("manifest serializes");
    text.push('\n');
    std::fs::write(&run_path, text).map_err(|source| PipelineError::Io {
        path: run_path,
        source,
    })
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), PipelineError> {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("artifact serializes"));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, PipelineError> {
    let raw = std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut items = Vec::new();
    for (idx, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(line).map_err(|e| PipelineError::BadRecord {
            path: path.to_path_buf(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        items.push(item);
    }
    Ok(items)
}

/// Load and schema-validate a summaries file.
pub fn load_summaries(path: &Path) -> Result<Vec<SummaryPair>, PipelineError> {
    read_jsonl(path)
}

/// Load and schema-validate a synthetic records file, re-checking the
/// score range and severity text invariants.
pub fn load_synthetic(path: &Path) -> Result<Vec<SyntheticRecord>, PipelineError> {
    let records: Vec<SyntheticRecord> = read_jsonl(path)?;
    for (idx, r) in records.iter().enumerate() {
        if r.target_phq8 > MAX_PHQ8 {
            return Err(PipelineError::BadRecord {
                path: path.to_path_buf(),
                line: idx + 1,
                message: format!("target_phq8 {} outside 0..=24", r.target_phq8),
            });
        }
        let expected = severity_description(r.target_phq8).expect("score in range");
        if r.severity_text != expected {
            return Err(PipelineError::BadRecord {
                path: path.to_path_buf(),
                line: idx + 1,
                message: format!(
                    "severity_text {:?} does not match band {:?} for score {}",
                    r.severity_text, expected, r.target_phq8
                ),
            });
        }
    }
    Ok(records)
}

/// Load a run manifest.
pub fn load_run(path: &Path) -> Result<PipelineRun, PipelineError> {
    let raw = std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&raw).map_err(|e| PipelineError::BadRecord {
        path: path.to_path_buf(),
        line: 1,
        message: e.to_string(),
    })
}
