//! Interview corpus ingestion: transcript parsing, score labels, splits,
//! and distribution statistics.
//!
//! Transcript files follow the 4-column tab-separated convention
//! (`start_time`, `stop_time`, `speaker`, `value`) with one header row.
//! Speaker names `Ellie` and `Participant` are recognized
//! case-insensitively; anything else is an error rather than a silent
//! drop, so schema drift fails loudly.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// Highest PHQ-8 score (eight items, each 0..=3).
pub const MAX_PHQ8: u8 = 24;

/// PHQ-8 cutoff at and above which a session counts as depressed.
pub const DEPRESSION_CUTOFF: u8 = 10;

/// Expected transcript header line.
pub const TRANSCRIPT_HEADER: &str = "start_time\tstop_time\tspeaker\tvalue";

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("line {line}: unknown speaker {speaker:?}")]
    UnknownSpeaker { line: usize, speaker: String },
    #[error("transcript has no participant turns")]
    EmptyTranscript,
    #[error("session {session}: PHQ-8 score {score} outside 0..=24")]
    ScoreOutOfRange { session: String, score: i64 },
    #[error("duplicate session id {session}")]
    DuplicateSession { session: String },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("session {session}: no entry in labels file")]
    MissingLabel { session: String },
    #[error("session {session}: no entry in split manifest")]
    MissingSplit { session: String },
    #[error("line {line}: unknown split {value:?} (expected train, dev, or test)")]
    UnknownSplit { line: usize, value: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Speaker {
    Interviewer,
    Participant,
}

impl Speaker {
    /// Canonical name used when writing the tab-separated format back out.
    pub fn transcript_name(&self) -> &'static str {
        match self {
            Speaker::Interviewer => "Ellie",
            Speaker::Participant => "Participant",
        }
    }
}

/// One speaker turn of an interview.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Turn {
    pub start_s: f64,
    pub stop_s: f64,
    pub speaker: Speaker,
    pub text: String,
}

/// Which part of the experiment a session belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Dev, Split::Test];

    pub fn name(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parsed transcript before its label and split are attached.
#[derive(Debug, Clone, PartialEq)]
pub struct UnlabeledTranscript {
    pub session_id: String,
    pub turns: Vec<Turn>,
}

impl UnlabeledTranscript {
    /// Attach a PHQ-8 label and split, validating the score range.
    pub fn labeled(self, phq8: i64, split: Split) -> Result<InterviewTranscript, CorpusError> {
        if !(0..=i64::from(MAX_PHQ8)).contains(&phq8) {
            return Err(CorpusError::ScoreOutOfRange {
                session: self.session_id,
                score: phq8,
            });
        }
        Ok(InterviewTranscript {
            session_id: self.session_id,
            turns: self.turns,
            phq8: phq8 as u8,
            split,
        })
    }

    pub fn participant_text(&self) -> String {
        participant_text_of(&self.turns)
    }
}

/// A validated interview session with its PHQ-8 label and split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterviewTranscript {
    pub session_id: String,
    pub turns: Vec<Turn>,
    pub phq8: u8,
    pub split: Split,
}

impl InterviewTranscript {
    /// Participant utterances in order, single-space joined.
    pub fn participant_text(&self) -> String {
        participant_text_of(&self.turns)
    }

    /// Serialize back to the 4-column tab-separated format.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from(TRANSCRIPT_HEADER);
        out.push('\n');
        for turn in &self.turns {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                turn.start_s,
                turn.stop_s,
                turn.speaker.transcript_name(),
                turn.text
            ));
        }
        out
    }

    pub fn is_depressed(&self) -> bool {
        self.phq8 >= DEPRESSION_CUTOFF
    }
}

fn participant_text_of(turns: &[Turn]) -> String {
    turns
        .iter()
        .filter(|t| t.speaker == Speaker::Participant)
        .map(|t| t.text.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parse one transcript file's contents.
///
/// Returns the transcript without label or split; both come from the
/// companion files and are attached via [`UnlabeledTranscript::labeled`].
pub fn parse_transcript(raw: &str, session_id: &str) -> Result<UnlabeledTranscript, CorpusError> {
    let mut lines = raw.lines().enumerate();
    let (_, header) = lines.next().ok_or(CorpusError::MalformedRow {
        line: 1,
        reason: "missing header row".into(),
    })?;
    if header.trim_end_matches('\r') != TRANSCRIPT_HEADER {
        return Err(CorpusError::MalformedRow {
            line: 1,
            reason: format!("bad header {header:?}"),
        });
    }

    let mut turns: Vec<Turn> = Vec::new();
    let mut prev_start = f64::NEG_INFINITY;
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(CorpusError::MalformedRow {
                line: line_no,
                reason: format!("expected 4 tab-separated columns, found {}", fields.len()),
            });
        }
        let start_s = parse_time(fields[0], line_no)?;
        let stop_s = parse_time(fields[1], line_no)?;
        if stop_s < start_s {
            return Err(CorpusError::MalformedRow {
                line: line_no,
                reason: format!("stop_time {stop_s} precedes start_time {start_s}"),
            });
        }
        if start_s < prev_start {
            return Err(CorpusError::MalformedRow {
                line: line_no,
                reason: format!("start_time {start_s} goes backwards (previous {prev_start})"),
            });
        }
        prev_start = start_s;
        let speaker = match fields[2].trim().to_ascii_lowercase().as_str() {
            "ellie" => Speaker::Interviewer,
            "participant" => Speaker::Participant,
            _ => {
                return Err(CorpusError::UnknownSpeaker {
                    line: line_no,
                    speaker: fields[2].to_string(),
                })
            }
        };
        let text = fields[3];
        if text.trim().is_empty() {
            return Err(CorpusError::MalformedRow {
                line: line_no,
                reason: "empty utterance".into(),
            });
        }
        turns.push(Turn {
            start_s,
            stop_s,
            speaker,
            text: text.to_string(),
        });
    }

    if !turns.iter().any(|t| t.speaker == Speaker::Participant) {
        return Err(CorpusError::EmptyTranscript);
    }
    Ok(UnlabeledTranscript {
        session_id: session_id.to_string(),
        turns,
    })
}

fn parse_time(field: &str, line: usize) -> Result<f64, CorpusError> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| CorpusError::MalformedRow {
            line,
            reason: format!("non-numeric time {field:?}"),
        })?;
    if !v.is_finite() || v < 0.0 {
        return Err(CorpusError::MalformedRow {
            line,
            reason: format!("time {field:?} must be a non-negative finite number"),
        });
    }
    Ok(v)
}

/// Parse the labels file (`session_id,phq8_score` with header).
pub fn load_labels(raw: &str) -> Result<BTreeMap<String, u8>, CorpusError> {
    let mut lines = raw.lines().enumerate();
    let (_, header) = lines.next().ok_or(CorpusError::MalformedRow {
        line: 1,
        reason: "missing header row".into(),
    })?;
    if header.trim_end_matches('\r') != "session_id,phq8_score" {
        return Err(CorpusError::MalformedRow {
            line: 1,
            reason: format!("bad header {header:?}"),
        });
    }
    let mut labels = BTreeMap::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 {
            return Err(CorpusError::MalformedRow {
                line: line_no,
                reason: format!("expected 2 comma-separated columns, found {}", fields.len()),
            });
        }
        let session = fields[0].trim().to_string();
        let score: i64 = fields[1]
            .trim()
            .parse()
            .map_err(|_| CorpusError::MalformedRow {
                line: line_no,
                reason: format!("non-integer score {:?}", fields[1]),
            })?;
        if !(0..=i64::from(MAX_PHQ8)).contains(&score) {
            return Err(CorpusError::ScoreOutOfRange { session, score });
        }
        if labels.insert(session.clone(), score as u8).is_some() {
            return Err(CorpusError::DuplicateSession { session });
        }
    }
    Ok(labels)
}

/// Parse the split manifest (`session_id,split` with header).
pub fn load_splits(raw: &str) -> Result<BTreeMap<String, Split>, CorpusError> {
    let mut lines = raw.lines().enumerate();
    let (_, header) = lines.next().ok_or(CorpusError::MalformedRow {
        line: 1,
        reason: "missing header row".into(),
    })?;
    if header.trim_end_matches('\r') != "session_id,split" {
        return Err(CorpusError::MalformedRow {
            line: 1,
            reason: format!("bad header {header:?}"),
        });
    }
    let mut splits = BTreeMap::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 {
            return Err(CorpusError::MalformedRow {
                line: line_no,
                reason: format!("expected 2 comma-separated columns, found {}", fields.len()),
            });
        }
        let session = fields[0].trim().to_string();
        let split = match fields[1].trim() {
            "train" => Split::Train,
            "dev" => Split::Dev,
            "test" => Split::Test,
            other => {
                return Err(CorpusError::UnknownSplit {
                    line: line_no,
                    value: other.to_string(),
                })
            }
        };
        if splits.insert(session.clone(), split).is_some() {
            return Err(CorpusError::DuplicateSession { session });
        }
    }
    Ok(splits)
}

/// Load every `<session_id>_TRANSCRIPT.tsv` under `dir` and join with the
/// labels file and split manifest.
///
/// Sessions are returned sorted by id. Label or split entries without a
/// matching transcript file are ignored; a transcript without both is an
/// error.
pub fn load_corpus(
    dir: &Path,
    labels_path: &Path,
    splits_path: &Path,
) -> Result<Vec<InterviewTranscript>, CorpusError> {
    let read = |path: &Path| {
        std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })
    };
    let labels = load_labels(&read(labels_path)?)?;
    let splits = load_splits(&read(splits_path)?)?;

    let mut session_files: Vec<(String, PathBuf)> = Vec::new();
    let entries = std::fs::read_dir(dir).map_err(|source| CorpusError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    for entry in entries {
        let entry = entry.map_err(|source| CorpusError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(session) = name.strip_suffix("_TRANSCRIPT.tsv") {
            session_files.push((session.to_string(), entry.path()));
        }
    }
    session_files.sort();

    let mut corpus = Vec::with_capacity(session_files.len());
    for (session, path) in session_files {
        let parsed = parse_transcript(&read(&path)?, &session)?;
        let phq8 = *labels
            .get(&session)
            .ok_or_else(|| CorpusError::MissingLabel {
                session: session.clone(),
            })?;
        let split = *splits
            .get(&session)
            .ok_or_else(|| CorpusError::MissingSplit {
                session: session.clone(),
            })?;
        corpus.push(parsed.labeled(i64::from(phq8), split)?);
    }
    Ok(corpus)
}

/// Per-split score histogram over the 25 possible PHQ-8 values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreDistribution {
    /// Counts indexed by score, one row per split present in the corpus.
    pub bins: BTreeMap<Split, Vec<u64>>,
    pub depressed_count: u64,
    pub total: u64,
}

impl ScoreDistribution {
    /// Count for one score summed over all splits.
    pub fn bin_count(&self, score: u8) -> u64 {
        assert!(score <= MAX_PHQ8);
        self.bins.values().map(|b| b[score as usize]).sum()
    }

    /// Combined histogram over all splits.
    pub fn combined_bins(&self) -> [u64; 25] {
        let mut out = [0u64; 25];
        for bins in self.bins.values() {
            for (slot, count) in out.iter_mut().zip(bins) {
                *slot += count;
            }
        }
        out
    }
}

/// Histogram of PHQ-8 labels across a corpus, split by split.
pub fn score_distribution(corpus: &[InterviewTranscript]) -> ScoreDistribution {
    let mut bins: BTreeMap<Split, Vec<u64>> = BTreeMap::new();
    let mut depressed = 0u64;
    for t in corpus {
        let row = bins.entry(t.split).or_insert_with(|| vec![0u64; 25]);
        row[t.phq8 as usize] += 1;
        if t.is_depressed() {
            depressed += 1;
        }
    }
    ScoreDistribution {
        bins,
        depressed_count: depressed,
        total: corpus.len() as u64,
    }
}

/// Word-count statistics over participant text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub avg_words: f64,
    pub max_words: usize,
}

/// Whitespace-tokenized word counts over [`InterviewTranscript::participant_text`].
pub fn corpus_stats(corpus: &[InterviewTranscript]) -> Result<CorpusStats, CorpusError> {
    if corpus.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let counts: Vec<usize> = corpus
        .iter()
        .map(|t| t.participant_text().split_whitespace().count())
        .collect();
    let total: usize = counts.iter().sum();
    Ok(CorpusStats {
        avg_words: total as f64 / counts.len() as f64,
        max_words: counts.into_iter().max().unwrap_or(0),
    })
}

/// Number of whitespace-separated words in `text`.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}
