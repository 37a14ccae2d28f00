//! Render the two-step prompt set for one transcript: the summarize
//! prompts (synopsis and sentiment) and the synthesis prompts at a
//! target severity.
//!
//! Usage: cargo run --example render_prompts -- [TARGET_SCORE]

use synterview::prompt::{
    render_summary_prompt, render_synthesis_prompt, severity_description, ItemKind,
    SUMMARY_PERSONA, SYNTHESIS_PERSONA,
};

const SAMPLE_TRANSCRIPT: &str = "Ellie asked how the last two weeks have gone. The participant \
described trouble falling asleep most nights, skipping meals, and losing interest in painting. \
They said mornings feel heaviest and that they have stopped returning calls from friends.";

const SAMPLE_SYNOPSIS: &str = "The participant reports disrupted sleep, reduced appetite, and \
withdrawal from hobbies and social contact over the last two weeks.";

fn banner(title: &str) {
    println!("\n=== {title} ===");
}

fn main() {
    let target: u8 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(15);
    let severity = match severity_description(target) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("bad target score: {e}");
            std::process::exit(2);
        }
    };

    println!("system persona (step 1): {SUMMARY_PERSONA}");
    for item in ItemKind::ALL {
        banner(&format!("summarize -> {}", item.item_name()));
        println!(
            "{}",
            render_summary_prompt(item, SAMPLE_TRANSCRIPT).unwrap()
        );
    }

    println!("\nsystem persona (step 2): {SYNTHESIS_PERSONA}");
    println!("target score {target} ({severity})");
    for item in ItemKind::ALL {
        banner(&format!("synthesize -> {}", item.synthetic_item_name()));
        println!(
            "{}",
            render_synthesis_prompt(item, SAMPLE_SYNOPSIS, target).unwrap()
        );
    }
}
