//! Tour of the offline mock endpoint: the score-correlated text
//! generator, its inverse estimator, and the template transport that
//! answers real pipeline prompts without a server.
//!
//! Usage: cargo run --example mock_chat

use synterview::client::{ChatClient, EndpointConfig, GenerationParams};
use synterview::mock::{
    emotional_density, estimate_score_from_text, synthesize_text, MockBehavior, MockChatTransport,
    TemplateRouter,
};
use synterview::pipeline::parse_model_json;
use synterview::prompt::{render_summary_prompt, ItemKind, SUMMARY_PERSONA};

fn main() {
    println!("score -> marker density -> text -> estimated score");
    for score in [0u8, 6, 12, 18, 24] {
        let text = synthesize_text(score, 42, 60);
        let estimate = estimate_score_from_text(&text);
        println!(
            "  {score:>2} (density {:.2}) -> {estimate:>2} | {}...",
            emotional_density(score),
            &text[..48.min(text.len())],
        );
    }

    // The template router answers a real summarize prompt with strict
    // compact JSON, like a well-behaved remote model.
    let client =
        ChatClient::over(EndpointConfig::default(), Box::new(TemplateRouter), true).unwrap();
    let transcript = synthesize_text(17, 99, 90);
    let prompt = render_summary_prompt(ItemKind::Synopsis, &transcript).unwrap();
    let exchange = client
        .complete(SUMMARY_PERSONA, &prompt, &GenerationParams::default())
        .unwrap();
    println!(
        "\ntemplate route, raw response:\n  {}",
        exchange.response_text
    );
    let (synopsis, repaired) = parse_model_json(&exchange.response_text, "synopsis").unwrap();
    println!("parsed synopsis (repaired: {repaired}):\n  {synopsis}");

    // The garbage behavior exercises the repair-then-quarantine path.
    let garbage = ChatClient::over(
        EndpointConfig::default(),
        Box::new(MockChatTransport::new(MockBehavior::Garbage)),
        true,
    )
    .unwrap();
    let exchange = garbage
        .complete(SUMMARY_PERSONA, &prompt, &GenerationParams::default())
        .unwrap();
    println!(
        "\ngarbage route, raw response:\n  {}",
        exchange.response_text
    );
    match parse_model_json(&exchange.response_text, "synopsis") {
        Ok(_) => println!("unexpectedly parsed"),
        Err(e) => println!("parse fails as intended: {e}"),
    }

    // Echo returns the user text verbatim, handy for prompt debugging.
    let echo = ChatClient::over(
        EndpointConfig::default(),
        Box::new(MockChatTransport::new(MockBehavior::Echo)),
        true,
    )
    .unwrap();
    let exchange = echo
        .complete(SUMMARY_PERSONA, "ping", &GenerationParams::default())
        .unwrap();
    println!("\necho route: {}", exchange.response_text);
}
