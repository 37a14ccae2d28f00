//! Deterministic demo corpora.
//!
//! The generator writes fully synthetic interview transcripts whose
//! participant text carries the same score-correlated marker vocabulary
//! as the mock transport, so the whole pipeline (summarize, synthesize,
//! evaluate) produces meaningful numbers offline. Identical specs write
//! identical bytes.

use std::io;
use std::path::Path;

use crate::corpus::{Split, TRANSCRIPT_HEADER};
use crate::mock::synthesize_text;
use crate::rng::fnv1a64;

/// One fixture session: id, label, and split membership.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionSpec {
    pub session_id: String,
    pub phq8: u8,
    pub split: Split,
}

/// A whole fixture corpus. `seed` shapes the participant wording only;
/// ids, labels, and splits are fixed by the session list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureSpec {
    pub sessions: Vec<SessionSpec>,
    pub seed: u64,
    pub words_per_session: usize,
}

const INTERVIEWER_QUESTIONS: [&str; 3] = [
    "how are you doing today",
    "tell me about the last few weeks",
    "what has been on your mind lately",
];

fn session(id: &str, phq8: u8, split: Split) -> SessionSpec {
    SessionSpec {
        session_id: id.to_string(),
        phq8,
        split,
    }
}

impl FixtureSpec {
    /// Five train sessions spanning the severity bands. Small enough for
    /// golden-file comparisons, rich enough to hit every pipeline path.
    pub fn small() -> FixtureSpec {
        let scores = [2u8, 9, 10, 15, 24];
        let sessions = scores
            .iter()
            .enumerate()
            .map(|(i, &s)| session(&format!("s{:03}", i + 1), s, Split::Train))
            .collect();
        FixtureSpec {
            sessions,
            seed: 7,
            words_per_session: 90,
        }
    }

    /// The desk-scale replication corpus: a deliberately imbalanced train
    /// split (40 low-score sessions cycling 0..=7 plus 5 high-score), a
    /// small dev split, and a uniform 50-session test split covering each
    /// score exactly twice.
    pub fn imbalanced() -> FixtureSpec {
        let mut sessions = Vec::with_capacity(45 + 6 + 50);
        for i in 0..40u8 {
            sessions.push(session(&format!("t{:03}", i + 1), i % 8, Split::Train));
        }
        for (i, &s) in [16u8, 18, 20, 22, 24].iter().enumerate() {
            sessions.push(session(&format!("t{:03}", 41 + i), s, Split::Train));
        }
        for (i, &s) in [2u8, 7, 9, 12, 17, 22].iter().enumerate() {
            sessions.push(session(&format!("d{:03}", i + 1), s, Split::Dev));
        }
        for i in 0..50u8 {
            sessions.push(session(&format!("e{:03}", i + 1), i % 25, Split::Test));
        }
        FixtureSpec {
            sessions,
            seed: 7,
            words_per_session: 90,
        }
    }
}

/// Participant wording for one session, before turn splitting.
pub fn participant_text(spec: &FixtureSpec, s: &SessionSpec) -> String {
    synthesize_text(
        s.phq8,
        spec.seed ^ fnv1a64(s.session_id.as_bytes()),
        spec.words_per_session,
    )
}

/// Render one session as transcript TSV: three interviewer questions,
/// each answered by a third of the participant text.
pub fn transcript_tsv(spec: &FixtureSpec, s: &SessionSpec) -> String {
    let text = participant_text(spec, s);
    let words: Vec<&str> = text.split_whitespace().collect();
    let third = words.len().div_ceil(3);
    let mut out = String::from(TRANSCRIPT_HEADER);
    out.push('\n');
    let mut clock = 0.0f64;
    for (i, question) in INTERVIEWER_QUESTIONS.iter().enumerate() {
        let chunk = words
            .iter()
            .skip(i * third)
            .take(third)
            .copied()
            .collect::<Vec<_>>()
            .join(" ");
        if chunk.is_empty() {
            break;
        }
        out.push_str(&format!(
            "{clock:.2}\t{:.2}\tEllie\t{question}\n",
            clock + 2.0
        ));
        clock += 3.0;
        out.push_str(&format!(
            "{clock:.2}\t{:.2}\tParticipant\t{chunk}\n",
            clock + 8.0
        ));
        clock += 9.0;
    }
    out
}

/// Write the corpus: one `<id>_TRANSCRIPT.tsv` per session plus
/// `labels.csv` and `splits.csv`. Rewrites are byte-identical.
pub fn write_fixture(dir: &Path, spec: &FixtureSpec) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut labels = String::from("session_id,phq8_score\n");
    let mut splits = String::from("session_id,split\n");
    for s in &spec.sessions {
        let path = dir.join(format!("{}_TRANSCRIPT.tsv", s.session_id));
        std::fs::write(path, transcript_tsv(spec, s))?;
        labels.push_str(&format!("{},{}\n", s.session_id, s.phq8));
        splits.push_str(&format!("{},{}\n", s.session_id, s.split));
    }
    std::fs::write(dir.join("labels.csv"), labels)?;
    std::fs::write(dir.join("splits.csv"), splits)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::load_corpus;
    use crate::mock::estimate_score_from_text;

    fn load(dir: &Path) -> Vec<crate::corpus::InterviewTranscript> {
        load_corpus(dir, &dir.join("labels.csv"), &dir.join("splits.csv")).unwrap()
    }

    #[test]
    fn small_fixture_loads_and_matches_labels() {
        let dir = tempfile::tempdir().unwrap();
        let spec = FixtureSpec::small();
        write_fixture(dir.path(), &spec).unwrap();
        let corpus = load(dir.path());
        assert_eq!(corpus.len(), 5);
        let scores: Vec<u8> = corpus.iter().map(|t| t.phq8).collect();
        assert_eq!(scores, vec![2, 9, 10, 15, 24]);
        assert!(corpus.iter().all(|t| t.split == Split::Train));
    }

    #[test]
    fn imbalanced_fixture_shape() {
        let spec = FixtureSpec::imbalanced();
        let train: Vec<&SessionSpec> = spec
            .sessions
            .iter()
            .filter(|s| s.split == Split::Train)
            .collect();
        let dev = spec
            .sessions
            .iter()
            .filter(|s| s.split == Split::Dev)
            .count();
        let test: Vec<&SessionSpec> = spec
            .sessions
            .iter()
            .filter(|s| s.split == Split::Test)
            .collect();
        assert_eq!(train.len(), 45);
        assert_eq!(train.iter().filter(|s| s.phq8 <= 7).count(), 40);
        assert_eq!(train.iter().filter(|s| s.phq8 >= 16).count(), 5);
        assert_eq!(dev, 6);
        assert_eq!(test.len(), 50);
        for score in 0u8..=24 {
            assert_eq!(
                test.iter().filter(|s| s.phq8 == score).count(),
                2,
                "test split must cover score {score} exactly twice"
            );
        }
    }

    #[test]
    fn writes_are_byte_identical() {
        let spec = FixtureSpec::small();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        write_fixture(a.path(), &spec).unwrap();
        write_fixture(b.path(), &spec).unwrap();
        for entry in std::fs::read_dir(a.path()).unwrap() {
            let name = entry.unwrap().file_name();
            let left = std::fs::read(a.path().join(&name)).unwrap();
            let right = std::fs::read(b.path().join(&name)).unwrap();
            assert_eq!(left, right, "{name:?} differs between writes");
        }
    }

    #[test]
    fn participant_text_round_trips_the_score() {
        let dir = tempfile::tempdir().unwrap();
        let spec = FixtureSpec::imbalanced();
        write_fixture(dir.path(), &spec).unwrap();
        for t in load(dir.path()) {
            let estimated = estimate_score_from_text(&t.participant_text());
            assert_eq!(
                estimated, t.phq8,
                "session {} text should encode its label",
                t.session_id
            );
        }
    }

    #[test]
    fn transcript_alternates_speakers_with_monotone_times() {
        let spec = FixtureSpec::small();
        let tsv = transcript_tsv(&spec, &spec.sessions[0]);
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines[0], TRANSCRIPT_HEADER);
        assert_eq!(lines.len(), 1 + 6);
        assert!(lines[1].contains("\tEllie\t"));
        assert!(lines[2].contains("\tParticipant\t"));
    }
}
