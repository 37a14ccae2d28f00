//! Parse a transcript corpus and print its shape: per-session turn and
//! word counts, the split layout, and the label histogram.
//!
//! Usage: cargo run --example parse_corpus -- [DIR]
//!
//! DIR must hold *_TRANSCRIPT.tsv files plus labels.csv and splits.csv;
//! the default is the small checked-in corpus used by the test suite.

use std::path::PathBuf;

use synterview::corpus::{corpus_stats, load_corpus, score_distribution};

fn main() {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/corpus5")
        });

    let corpus = match load_corpus(&dir, &dir.join("labels.csv"), &dir.join("splits.csv")) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("failed to load {}: {e}", dir.display());
            std::process::exit(3);
        }
    };

    println!("{} sessions from {}", corpus.len(), dir.display());
    for t in &corpus {
        println!(
            "  {} [{}] phq8 {:>2} {} | {} turns, {} participant words",
            t.session_id,
            t.split.name(),
            t.phq8,
            if t.is_depressed() {
                "depressed"
            } else {
                "not depressed"
            },
            t.turns.len(),
            t.participant_text().split_whitespace().count(),
        );
    }

    let stats = corpus_stats(&corpus).expect("non-empty corpus");
    println!(
        "participant text: avg {:.1} words, max {}",
        stats.avg_words, stats.max_words
    );

    let dist = score_distribution(&corpus);
    println!(
        "labels: {} of {} at or above the cutoff; combined bins:",
        dist.depressed_count, dist.total
    );
    for (score, count) in dist.combined_bins().iter().enumerate() {
        if *count > 0 {
            println!("  score {score:>2}: {}", "#".repeat(*count as usize));
        }
    }
}
