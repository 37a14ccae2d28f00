//! Prompt rendering, severity bands, and target-score sampling.
//!
//! The two prompt templates live under `assets/` as plain text with
//! `{placeholder}` markers and are embedded at compile time. Rendering is
//! pure string substitution plus a one-shot example output appended per
//! item kind, so repeated calls are byte-identical and golden-testable.

use crate::corpus::{ScoreDistribution, MAX_PHQ8};
use crate::rng::SplitMix64;
use serde::{Deserialize, Serialize};

const SUMMARY_TEMPLATE: &str = include_str!("../assets/summary_prompt.txt");
const SYNTHESIS_TEMPLATE: &str = include_str!("../assets/synthesis_prompt.txt");
const EXAMPLE_SYNOPSIS: &str = include_str!("../assets/example_synopsis.json");
const EXAMPLE_SENTIMENT: &str = include_str!("../assets/example_sentiment.json");

/// System message for the distillation step.
pub const SUMMARY_PERSONA: &str = "You are an intelligent assistant.";

/// System message for the synthesis step.
pub const SYNTHESIS_PERSONA: &str = "You are an intelligent data generation assistant.";

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PromptError {
    #[error("PHQ-8 score {0} outside 0..=24")]
    ScoreOutOfRange(u32),
    #[error("transcript text is empty")]
    EmptyTranscriptText,
    #[error("source item text is empty")]
    EmptySourceItem,
    #[error("inverse-frequency sampling requires an observed distribution")]
    MissingDistribution,
}

/// Which of the two artifacts a prompt asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ItemKind {
    Synopsis,
    Sentiment,
}

impl ItemKind {
    pub const ALL: [ItemKind; 2] = [ItemKind::Synopsis, ItemKind::Sentiment];

    /// `{item}` value in the distillation template, also the JSON output key.
    pub fn item_name(&self) -> &'static str {
        match self {
            ItemKind::Synopsis => "synopsis",
            ItemKind::Sentiment => "sentiment",
        }
    }

    /// `{item}` value in the synthesis template.
    pub fn synthetic_item_name(&self) -> &'static str {
        match self {
            ItemKind::Synopsis => "synthetic synopsis",
            ItemKind::Sentiment => "synthetic sentiment",
        }
    }

    /// One-shot example output appended to every prompt for this kind.
    pub fn example_output(&self) -> &'static str {
        match self {
            ItemKind::Synopsis => EXAMPLE_SYNOPSIS.trim_end(),
            ItemKind::Sentiment => EXAMPLE_SENTIMENT.trim_end(),
        }
    }
}

/// A contiguous PHQ-8 score range with its clinical description.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeverityBand {
    pub lo: u8,
    pub hi: u8,
    pub description: &'static str,
}

/// Standard PHQ-8 bands; together they tile 0..=24 without overlap.
pub const SEVERITY_BANDS: [SeverityBand; 5] = [
    SeverityBand {
        lo: 0,
        hi: 4,
        description: "minimal or no depressive symptoms",
    },
    SeverityBand {
        lo: 5,
        hi: 9,
        description: "mild depressive symptoms",
    },
    SeverityBand {
        lo: 10,
        hi: 14,
        description: "moderate depression",
    },
    SeverityBand {
        lo: 15,
        hi: 19,
        description: "moderately severe depression",
    },
    SeverityBand {
        lo: 20,
        hi: 24,
        description: "severe depression",
    },
];

/// Description of the unique severity band containing `score`.
pub fn severity_description(score: u8) -> Result<&'static str, PromptError> {
    SEVERITY_BANDS
        .iter()
        .find(|b| (b.lo..=b.hi).contains(&score))
        .map(|b| b.description)
        .ok_or(PromptError::ScoreOutOfRange(u32::from(score)))
}

fn substitute(template: &str, pairs: &[(&str, &str)]) -> String {
    let mut out = template.trim_end().to_string();
    for (key, value) in pairs {
        out = out.replace(&format!("{{{key}}}"), value);
    }
    out
}

fn with_example(body: String, item: ItemKind) -> String {
    format!("{body}\nExample output: {}", item.example_output())
}

/// Render the distillation prompt (transcript to synopsis or sentiment).
pub fn render_summary_prompt(item: ItemKind, transcript_text: &str) -> Result<String, PromptError> {
    if transcript_text.trim().is_empty() {
        return Err(PromptError::EmptyTranscriptText);
    }
    let body = substitute(
        SUMMARY_TEMPLATE,
        &[("item", item.item_name()), ("Transcript", transcript_text)],
    );
    Ok(with_example(body, item))
}

/// Render the synthesis prompt (original item to synthetic item at a
/// target score).
pub fn render_synthesis_prompt(
    item: ItemKind,
    og_value: &str,
    target_score: u8,
) -> Result<String, PromptError> {
    if og_value.trim().is_empty() {
        return Err(PromptError::EmptySourceItem);
    }
    if target_score > MAX_PHQ8 {
        return Err(PromptError::ScoreOutOfRange(u32::from(target_score)));
    }
    let dep = severity_description(target_score)?;
    let score_text = target_score.to_string();
    let body = substitute(
        SYNTHESIS_TEMPLATE,
        &[
            ("item", item.synthetic_item_name()),
            ("og_item", item.item_name()),
            ("og_item_value", og_value),
            ("PHQ8_Score", &score_text),
            ("dep", dep),
        ],
    );
    Ok(with_example(body, item))
}

/// How target scores are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// I.i.d. uniform over 0..=24.
    Uniform,
    /// Probability proportional to `1/(1 + bin_count(score))`, favoring
    /// scores the observed corpus covers poorly.
    InverseFrequency,
}

/// Sampling mode plus the seed that fully determines the sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingStrategy {
    pub mode: SamplingMode,
    pub seed: u64,
}

/// Unnormalized inverse-frequency weights per score.
pub fn inverse_frequency_weights(observed: &ScoreDistribution) -> [f64; 25] {
    let bins = observed.combined_bins();
    let mut weights = [0.0f64; 25];
    for (score, w) in weights.iter_mut().enumerate() {
        *w = 1.0 / (1.0 + bins[score] as f64);
    }
    weights
}

/// Draw `n` target PHQ-8 scores.
///
/// Identical `(strategy, observed)` inputs give identical output; the
/// sampler owns its own generator seeded from `strategy.seed`.
pub fn sample_target_scores(
    n: usize,
    strategy: SamplingStrategy,
    observed: Option<&ScoreDistribution>,
) -> Result<Vec<u8>, PromptError> {
    assert!(n >= 1, "sample_target_scores requires n >= 1");
    let mut rng = SplitMix64::new(strategy.seed);
    match strategy.mode {
        SamplingMode::Uniform => Ok((0..n).map(|_| rng.next_below(25) as u8).collect()),
        SamplingMode::InverseFrequency => {
            let observed = observed.ok_or(PromptError::MissingDistribution)?;
            let weights = inverse_frequency_weights(observed);
            let total: f64 = weights.iter().sum();
            Ok((0..n)
                .map(|_| {
                    let mut target = rng.next_f64() * total;
                    for (score, w) in weights.iter().enumerate() {
                        if target < *w {
                            return score as u8;
                        }
                        target -= w;
                    }
                    // Float round-off can exhaust the loop; last bin.
                    MAX_PHQ8
                })
                .collect())
        }
    }
}
