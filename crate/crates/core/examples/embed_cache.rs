//! The feature-hashing embedder and the content-addressed cache: embed a
//! few texts, show determinism, then demonstrate that a second pass is
//! served from the cache file.
//!
//! Usage: cargo run --example embed_cache

use synterview::embedding::{content_hash, embed_texts, hashing_embed, EmbeddingProvider};

fn main() {
    let texts = [
        "The participant reports steady sleep and regular meals.",
        "The participant describes exhaustion and hopeless mornings.",
        "Short check-in with few concerns raised.",
    ];

    // The hashing backend needs no server and is fully deterministic.
    for text in &texts {
        let v = hashing_embed(text, 16).unwrap();
        let again = hashing_embed(text, 16).unwrap();
        assert_eq!(v, again, "hashing embeddings are deterministic");
        let preview: Vec<String> = v.iter().take(4).map(|x| format!("{x:+.3}")).collect();
        println!(
            "{} -> [{}, ...]",
            content_hash(text).get(..12).unwrap(),
            preview.join(", ")
        );
    }

    // Behind a provider the same calls go through the cache layer.
    let dir = std::env::temp_dir().join("embed_cache_demo");
    std::fs::create_dir_all(&dir).unwrap();
    let cache_file = dir.join("cache.jsonl");
    let _ = std::fs::remove_file(&cache_file);

    let provider = EmbeddingProvider::hashing(64)
        .unwrap()
        .with_cache(&cache_file);
    let items: Vec<(String, String)> = texts
        .iter()
        .enumerate()
        .map(|(i, t)| (format!("t{i}"), t.to_string()))
        .collect();

    let first = embed_texts(&provider, &items).unwrap();
    let cached_lines = std::fs::read_to_string(&cache_file)
        .unwrap()
        .lines()
        .count();
    println!(
        "\nembedded {} texts at dim {}; cache now holds {} entries",
        first.len(),
        first[0].dim,
        cached_lines
    );

    let second = embed_texts(&provider, &items).unwrap();
    assert_eq!(first, second, "cache hits reproduce the original vectors");
    let lines_after = std::fs::read_to_string(&cache_file)
        .unwrap()
        .lines()
        .count();
    println!("second pass served from cache (still {lines_after} entries, no growth)");
}
