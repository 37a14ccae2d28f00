//! Write a deterministic demo corpus plus a ready-to-run config.
//!
//! Usage: cargo run --example make_fixture -- [DIR] [small|imbalanced]
//!
//! Afterwards try the CLI against it:
//!   cargo run --bin pipeline -- ingest --config DIR/config.json
//!   cargo run --bin pipeline -- generate --config DIR/config.json --mock template
//!   cargo run --bin pipeline -- evaluate --config DIR/config.json

use std::path::PathBuf;

use synterview::fixture::{write_fixture, FixtureSpec};

fn main() -> std::io::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "demo_corpus".into()));
    let shape = args.next().unwrap_or_else(|| "small".into());
    let spec = match shape.as_str() {
        "imbalanced" => FixtureSpec::imbalanced(),
        "small" => FixtureSpec::small(),
        other => {
            eprintln!("unknown shape {other:?} (expected small or imbalanced)");
            std::process::exit(2);
        }
    };
    write_fixture(&dir, &spec)?;

    let config = serde_json::json!({
        "corpus_dir": ".",
        "labels_file": "labels.csv",
        "splits_file": "splits.csv",
        "output_dir": "out",
        "seed": 7,
        "variants_per_source": 3,
    });
    let mut text = serde_json::to_string_pretty(&config).expect("config serializes");
    text.push('\n');
    std::fs::write(dir.join("config.json"), text)?;

    println!(
        "wrote {} sessions ({}) and config.json under {}",
        spec.sessions.len(),
        shape,
        dir.display()
    );
    Ok(())
}
