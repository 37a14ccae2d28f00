//! The full evaluation toolkit on a desk-scale mock dataset: utility
//! (ridge over three training configs), fidelity (2-D PCA), privacy
//! (nearest-neighbor distances), and the score histogram.
//!
//! Usage: cargo run --example evaluate_reports -- [SEED]

use synterview::embedding::{embed_texts, EmbeddingProvider};
use synterview::eval::{
    histogram_report, max_min_bin_ratio, min_distance_report, pca_2d, utility_experiment,
    LabeledText, Metric, Pairing, SourceTag, TrainConfig,
};
use synterview::mock::synthesize_text;

/// Imbalanced real set (mostly low scores) plus a balanced synthetic set,
/// mirroring the augmentation scenario the toolkit is built for.
fn demo_sets(seed: u64) -> (Vec<LabeledText>, Vec<LabeledText>, Vec<LabeledText>) {
    let real: Vec<LabeledText> = (0..30)
        .map(|i| {
            let score = (i % 6) as u8;
            LabeledText::new(
                format!("real-{i:02}"),
                synthesize_text(score, seed ^ i, 80),
                score,
            )
        })
        .collect();
    let synthetic: Vec<LabeledText> = (0..75)
        .map(|i| {
            let score = (i % 25) as u8;
            LabeledText::new(
                format!("syn-{i:02}"),
                synthesize_text(score, seed ^ (1000 + i), 80),
                score,
            )
        })
        .collect();
    let test: Vec<LabeledText> = (0..50)
        .map(|i| {
            let score = (i % 25) as u8;
            LabeledText::new(
                format!("test-{i:02}"),
                synthesize_text(score, seed ^ (2000 + i), 80),
                score,
            )
        })
        .collect();
    (real, synthetic, test)
}

fn main() {
    let seed: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(7);
    let (real, synthetic, test) = demo_sets(seed);
    let provider = EmbeddingProvider::hashing(128).unwrap();

    // Utility: does synthetic data help a downstream severity regressor?
    let utility = utility_experiment(&real, &synthetic, &test, &provider, 1.0).unwrap();
    println!("utility (ridge, lambda {}):", utility.lambda);
    for config in [
        TrainConfig::RealOnly,
        TrainConfig::SyntheticOnly,
        TrainConfig::Combined,
    ] {
        let row = utility.row(config).unwrap();
        println!(
            "  {:<14} rmse {:>6.3}  mae {:>6.3}  (n_train {})",
            format!("{config:?}"),
            row.rmse,
            row.mae,
            row.n_train
        );
    }

    // Fidelity: do the two clouds overlap in the top-2 PCA plane?
    let mut items: Vec<(String, String)> = Vec::new();
    let mut tags = Vec::new();
    for r in &real {
        items.push((r.id.clone(), r.text.clone()));
        tags.push(SourceTag::Real);
    }
    for s in &synthetic {
        items.push((s.id.clone(), s.text.clone()));
        tags.push(SourceTag::Synthetic);
    }
    let vectors = embed_texts(&provider, &items).unwrap();
    let fidelity = pca_2d(&vectors, &tags).unwrap();
    println!(
        "\nfidelity: {} points, explained variance ({:.3}, {:.3})",
        fidelity.points.len(),
        fidelity.explained_variance_ratio[0],
        fidelity.explained_variance_ratio[1],
    );

    // Privacy: synthetic points should not sit on top of real ones.
    let real_vectors = &vectors[..real.len()];
    let syn_vectors = &vectors[real.len()..];
    let baseline = min_distance_report(
        Pairing::RealVsReal,
        real_vectors,
        real_vectors,
        true,
        Metric::L2,
    )
    .unwrap();
    let cross = min_distance_report(
        Pairing::RealVsSynthetic,
        real_vectors,
        syn_vectors,
        false,
        Metric::L2,
    )
    .unwrap();
    println!("\nprivacy (l2 nearest neighbor):");
    println!(
        "  real vs real       min {:.4}  avg {:.4}",
        baseline.min_dist, baseline.avg_min_dist
    );
    println!(
        "  real vs synthetic  min {:.4}  avg {:.4}",
        cross.min_dist, cross.avg_min_dist
    );

    // Histogram: augmentation flattens the label distribution.
    let real_scores: Vec<u8> = real.iter().map(|r| r.score).collect();
    let combined: Vec<u8> = real_scores
        .iter()
        .copied()
        .chain(synthetic.iter().map(|s| s.score))
        .collect();
    let report = histogram_report(&[
        ("real".to_string(), real_scores),
        ("combined".to_string(), combined),
    ])
    .unwrap();
    println!("\nhistogram max/min bin ratios:");
    for row in &report.rows {
        println!("  {:<9} {:.2}", row.dataset, max_min_bin_ratio(&row.bins));
    }
}
