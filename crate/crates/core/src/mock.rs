//! Deterministic in-process mock endpoint.
//!
//! The template behaviors synthesize single-line JSON whose emotional-word
//! density is a monotone function of the PHQ-8 score found in the prompt,
//! so utility experiments run at desk scale without any network. The same
//! vocabulary drives [`estimate_score_from_text`], giving a closed loop:
//! text synthesized at score `s` estimates back to `s`.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use regex::Regex;

use crate::client::{wire_body_with_content, ChatRequest, ChatTransport, WireError, WireResponse};
use crate::corpus::MAX_PHQ8;
use crate::prompt::ItemKind;
use crate::rng::{fnv1a64, SplitMix64};

/// What the mock endpoint does with each request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MockBehavior {
    /// Respond with the user text verbatim.
    Echo,
    /// Act as the distillation step: infer a score from the transcript
    /// section and synthesize a matching synopsis or sentiment.
    TemplateSummary,
    /// Act as the synthesis step: read the target score off the prompt
    /// and synthesize text at that severity.
    TemplateSynthesis,
    /// Fail the first `n` calls at the transport level, then succeed.
    FailNTimes(u32),
    /// Respond with non-JSON rambling to exercise parse repair.
    Garbage,
}

/// Marker vocabulary per severity band, lowest tier first. Emotional
/// density and tier membership together encode a score into text.
pub const MARKER_TIERS: [[&str; 5]; 5] = [
    ["content", "cheerful", "energetic", "hopeful", "relaxed"],
    ["tired", "worried", "restless", "uneasy", "strained"],
    ["sad", "withdrawn", "sleepless", "discouraged", "numb"],
    [
        "hopeless",
        "exhausted",
        "isolated",
        "tearful",
        "overwhelmed",
    ],
    [
        "despairing",
        "worthless",
        "immobilized",
        "desolate",
        "anhedonic",
    ],
];

const FILLER: [&str; 20] = [
    "the",
    "participant",
    "talks",
    "about",
    "daily",
    "routine",
    "walks",
    "meals",
    "work",
    "sleep",
    "plans",
    "weather",
    "family",
    "neighbors",
    "garden",
    "music",
    "reading",
    "evening",
    "morning",
    "errands",
];

const GARBAGE_TEXT: &str = "hmm so anyway the model just rambles here with no structure at all \
     stuttering and trailing off mid sentence without ever producing a payload";

/// Fraction of emotional marker words for a given score.
pub fn emotional_density(score: u8) -> f64 {
    0.10 + 0.03 * f64::from(score)
}

/// Deterministic single-line text with exactly
/// `round(n_words * emotional_density(score))` marker words drawn from the
/// score's tier, the rest neutral filler.
pub fn synthesize_text(score: u8, seed: u64, n_words: usize) -> String {
    assert!(score <= MAX_PHQ8, "score {score} outside 0..=24");
    assert!(n_words >= 1, "n_words must be positive");
    let tier = &MARKER_TIERS[(score / 5) as usize];
    let mut remaining_markers = (n_words as f64 * emotional_density(score)).round() as usize;
    let mut rng = SplitMix64::new(seed ^ (u64::from(score) << 32));
    let mut words = Vec::with_capacity(n_words);
    for i in 0..n_words {
        let remaining_positions = (n_words - i) as u64;
        // Sequential hypergeometric draw: exact marker count, shuffled
        // positions.
        if (rng.next_below(remaining_positions) as usize) < remaining_markers {
            words.push(tier[rng.next_below(tier.len() as u64) as usize]);
            remaining_markers -= 1;
        } else {
            words.push(FILLER[rng.next_below(FILLER.len() as u64) as usize]);
        }
    }
    let mut text = words.join(" ");
    let first = text[..1].to_ascii_uppercase();
    text.replace_range(..1, &first);
    text.push('.');
    text
}

/// Invert [`synthesize_text`]: recover a score from marker density and
/// the dominant tier. Texts without markers estimate to the midpoint 12.
pub fn estimate_score_from_text(text: &str) -> u8 {
    let mut tier_counts = [0usize; 5];
    let mut total = 0usize;
    for raw in text.split_whitespace() {
        let word = raw
            .trim_matches(|c: char| !c.is_alphanumeric())
            .to_ascii_lowercase();
        if word.is_empty() {
            continue;
        }
        total += 1;
        for (t, tier) in MARKER_TIERS.iter().enumerate() {
            if tier.contains(&word.as_str()) {
                tier_counts[t] += 1;
                break;
            }
        }
    }
    let markers: usize = tier_counts.iter().sum();
    if total == 0 || markers == 0 {
        return 12;
    }
    let density = markers as f64 / total as f64;
    let raw = ((density - 0.10) / 0.03).round().clamp(0.0, 24.0) as u8;
    let mut dominant = 0usize;
    for (t, &c) in tier_counts.iter().enumerate() {
        if c > tier_counts[dominant] {
            dominant = t;
        }
    }
    let lo = (dominant as u8) * 5;
    raw.clamp(lo, lo + 4)
}

fn score_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"PHQ8 score of (\d+)").unwrap())
}

fn extract_between<'a>(haystack: &'a str, start: &str, end: &str) -> Option<&'a str> {
    let from = haystack.find(start)? + start.len();
    let len = haystack[from..].find(end)?;
    Some(&haystack[from..from + len])
}

fn ok_wire(content: &str) -> Result<WireResponse, WireError> {
    Ok(WireResponse {
        status: 200,
        body: wire_body_with_content(content),
    })
}

fn item_json(item: ItemKind, text: &str) -> String {
    serde_json::json!({ item.item_name(): text }).to_string()
}

fn words_for(item: ItemKind) -> usize {
    match item {
        ItemKind::Synopsis => 60,
        ItemKind::Sentiment => 50,
    }
}

/// Pure mock response for one request. `call_index` counts prior calls on
/// the same transport and only matters for [`MockBehavior::FailNTimes`].
pub fn mock_complete(
    behavior: &MockBehavior,
    req: &ChatRequest,
    call_index: u64,
) -> Result<WireResponse, WireError> {
    match behavior {
        MockBehavior::Echo => ok_wire(&req.user_text),
        MockBehavior::Garbage => ok_wire(GARBAGE_TEXT),
        MockBehavior::FailNTimes(n) => {
            if call_index < u64::from(*n) {
                Err(WireError::Transport("mock transport failure".into()))
            } else {
                ok_wire("OK")
            }
        }
        MockBehavior::TemplateSummary => {
            let item = if req.user_text.contains("generating a sentiment") {
                ItemKind::Sentiment
            } else {
                ItemKind::Synopsis
            };
            let transcript =
                extract_between(&req.user_text, "Transcript: ", "\nInstructions:").unwrap_or("");
            let score = estimate_score_from_text(transcript);
            let text = synthesize_text(score, fnv1a64(req.user_text.as_bytes()), words_for(item));
            ok_wire(&item_json(item, &text))
        }
        MockBehavior::TemplateSynthesis => {
            let item = if req.user_text.contains("creating a synthetic sentiment") {
                ItemKind::Sentiment
            } else {
                ItemKind::Synopsis
            };
            let score = score_regex()
                .captures(&req.user_text)
                .and_then(|c| c[1].parse::<u8>().ok())
                .map(|s| s.min(MAX_PHQ8))
                .unwrap_or(12);
            let text = synthesize_text(score, fnv1a64(req.user_text.as_bytes()), words_for(item));
            ok_wire(&item_json(item, &text))
        }
    }
}

/// Transport wrapping one behavior; counts calls for `FailNTimes`.
pub struct MockChatTransport {
    behavior: MockBehavior,
    calls: AtomicU64,
}

impl MockChatTransport {
    pub fn new(behavior: MockBehavior) -> Self {
        MockChatTransport {
            behavior,
            calls: AtomicU64::new(0),
        }
    }

    /// Requests seen so far.
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::SeqCst)
    }
}

impl ChatTransport for MockChatTransport {
    fn send(&self, req: &ChatRequest) -> Result<WireResponse, WireError> {
        let idx = self.calls.fetch_add(1, Ordering::SeqCst);
        mock_complete(&self.behavior, req, idx)
    }
}

/// Stateless transport for full pipeline runs: routes each request to
/// the template behavior matching its step, recognized by the prompt's
/// opening persona line.
pub struct TemplateRouter;

impl ChatTransport for TemplateRouter {
    fn send(&self, req: &ChatRequest) -> Result<WireResponse, WireError> {
        let behavior = if req
            .user_text
            .starts_with("You are an intelligent data generation assistant")
        {
            MockBehavior::TemplateSynthesis
        } else {
            MockBehavior::TemplateSummary
        };
        mock_complete(&behavior, req, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::client::GenerationParams;
    use crate::prompt::{
        render_summary_prompt, render_synthesis_prompt, SUMMARY_PERSONA, SYNTHESIS_PERSONA,
    };
    use proptest::prelude::*;

    fn req(system: &str, user: &str) -> ChatRequest {
        ChatRequest {
            model: "mock".into(),
            system_text: system.into(),
            user_text: user.into(),
            params: GenerationParams::default(),
            include_repetition_penalty: true,
        }
    }

    fn content_of(resp: &WireResponse) -> String {
        let v: serde_json::Value = serde_json::from_str(&resp.body).unwrap();
        v["choices"][0]["message"]["content"]
            .as_str()
            .unwrap()
            .to_string()
    }

    fn marker_count(text: &str, tier: usize) -> usize {
        text.split_whitespace()
            .map(|w| {
                w.trim_matches(|c: char| !c.is_alphanumeric())
                    .to_ascii_lowercase()
            })
            .filter(|w| MARKER_TIERS[tier].contains(&w.as_str()))
            .count()
    }

    #[test]
    fn echo_returns_user_text() {
        let r = req(SUMMARY_PERSONA, "OK");
        let resp = mock_complete(&MockBehavior::Echo, &r, 0).unwrap();
        assert_eq!(content_of(&resp), "OK");
    }

    #[test]
    fn fail_n_times_fails_then_succeeds() {
        let r = req(SUMMARY_PERSONA, "x");
        assert!(mock_complete(&MockBehavior::FailNTimes(1), &r, 0).is_err());
        let resp = mock_complete(&MockBehavior::FailNTimes(1), &r, 1).unwrap();
        assert_eq!(content_of(&resp), "OK");
    }

    #[test]
    fn garbage_defeats_strict_and_repair_parsing() {
        let r = req(SUMMARY_PERSONA, "x");
        let content = content_of(&mock_complete(&MockBehavior::Garbage, &r, 0).unwrap());
        assert!(serde_json::from_str::<serde_json::Value>(&content).is_err());
        assert!(!content.contains('{'));
    }

    #[test]
    fn synthesis_at_24_uses_high_severity_vocabulary() {
        let prompt =
            render_synthesis_prompt(crate::prompt::ItemKind::Synopsis, "src text", 24).unwrap();
        let r = req(SYNTHESIS_PERSONA, &prompt);
        let content = content_of(&mock_complete(&MockBehavior::TemplateSynthesis, &r, 0).unwrap());
        let v: serde_json::Value = serde_json::from_str(&content).unwrap();
        let text = v["synopsis"].as_str().unwrap();
        assert!(marker_count(text, 4) > 0, "no tier-4 markers in: {text}");
        assert_eq!(marker_count(text, 0), 0);
    }

    #[test]
    fn synthesis_at_0_uses_low_severity_vocabulary() {
        let prompt =
            render_synthesis_prompt(crate::prompt::ItemKind::Sentiment, "src text", 0).unwrap();
        let r = req(SYNTHESIS_PERSONA, &prompt);
        let content = content_of(&mock_complete(&MockBehavior::TemplateSynthesis, &r, 0).unwrap());
        let v: serde_json::Value = serde_json::from_str(&content).unwrap();
        let text = v["sentiment"].as_str().unwrap();
        assert!(marker_count(text, 0) > 0);
        assert_eq!(marker_count(text, 4), 0);
    }

    #[test]
    fn density_is_monotone_in_score() {
        let low = synthesize_text(0, 9, 200);
        let mid = synthesize_text(12, 9, 200);
        let high = synthesize_text(24, 9, 200);
        let density = |t: &str| {
            (0..5).map(|tier| marker_count(t, tier)).sum::<usize>() as f64
                / t.split_whitespace().count() as f64
        };
        assert!(density(&low) < density(&mid));
        assert!(density(&mid) < density(&high));
    }

    #[test]
    fn identical_requests_get_byte_identical_responses() {
        let prompt = render_synthesis_prompt(crate::prompt::ItemKind::Synopsis, "src", 17).unwrap();
        let r = req(SYNTHESIS_PERSONA, &prompt);
        let a = mock_complete(&MockBehavior::TemplateSynthesis, &r, 0).unwrap();
        let b = mock_complete(&MockBehavior::TemplateSynthesis, &r, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn summary_recovers_score_encoded_in_transcript() {
        let transcript = synthesize_text(17, 31, 120);
        let prompt = render_summary_prompt(crate::prompt::ItemKind::Synopsis, &transcript).unwrap();
        let r = req(SUMMARY_PERSONA, &prompt);
        let content = content_of(&mock_complete(&MockBehavior::TemplateSummary, &r, 0).unwrap());
        let v: serde_json::Value = serde_json::from_str(&content).unwrap();
        let text = v["synopsis"].as_str().unwrap();
        assert_eq!(estimate_score_from_text(text), 17);
    }

    #[test]
    fn router_dispatches_by_persona_line() {
        let summary = render_summary_prompt(crate::prompt::ItemKind::Sentiment, "t").unwrap();
        let synth = render_synthesis_prompt(crate::prompt::ItemKind::Synopsis, "s", 3).unwrap();
        let a = TemplateRouter
            .send(&req(SUMMARY_PERSONA, &summary))
            .unwrap();
        let b = TemplateRouter
            .send(&req(SYNTHESIS_PERSONA, &synth))
            .unwrap();
        let va: serde_json::Value = serde_json::from_str(&content_of(&a)).unwrap();
        let vb: serde_json::Value = serde_json::from_str(&content_of(&b)).unwrap();
        assert!(va.get("sentiment").is_some());
        assert!(vb.get("synopsis").is_some());
    }

    #[test]
    fn synthesized_text_is_single_line_without_pronouns() {
        for score in [0u8, 7, 13, 19, 24] {
            let text = synthesize_text(score, 99, 80);
            assert!(!text.contains('\n'));
            for banned in ["i", "me", "my", "mine", "we", "our"] {
                for w in text.split_whitespace() {
                    let w = w
                        .trim_matches(|c: char| !c.is_alphanumeric())
                        .to_ascii_lowercase();
                    assert_ne!(w, banned, "banned pronoun in: {text}");
                }
            }
        }
    }

    #[test]
    fn estimate_defaults_to_midpoint_without_markers() {
        assert_eq!(
            estimate_score_from_text("plain words about nothing much"),
            12
        );
    }

    proptest! {
        #[test]
        fn synthesis_round_trips_every_score(score in 0u8..=24, seed in any::<u64>()) {
            let text = synthesize_text(score, seed, 120);
            prop_assert_eq!(estimate_score_from_text(&text), score);
        }

        #[test]
        fn output_sizes_round_trip_too(score in 0u8..=24, seed in any::<u64>()) {
            for n in [50usize, 60] {
                let text = synthesize_text(score, seed, n);
                prop_assert_eq!(estimate_score_from_text(&text), score);
            }
        }
    }
}
