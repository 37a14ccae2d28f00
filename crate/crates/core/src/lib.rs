//! Privacy-preserving synthetic clinical-interview summaries, end to
//! end: distill real transcripts into synopsis/sentiment pairs with a
//! chat model, rewrite them at sampled PHQ-8 severities, and evaluate
//! the result for downstream utility, distributional fidelity, and
//! nearest-neighbor privacy.
//!
//! The two-step pipeline ([`pipeline`]) talks to any chat-completions
//! endpoint through [`client`], with deterministic offline stand-ins in
//! [`mock`]. Evaluation ([`eval`]) embeds texts ([`embedding`]), fits
//! ridge regressors over three training configurations, projects real
//! and synthetic clouds onto a shared 2-D PCA plane, and reports
//! minimum-distance privacy statistics. The `pipeline` binary wires it
//! all into `ingest`, `generate`, `evaluate`, and `report` subcommands
//! driven by one JSON config ([`config`]).
//!
//! Runnable walkthroughs, one per capability, live under `examples/`:
//!
//! - `make_fixture`: write a demo corpus plus a ready-to-run config
//! - `parse_corpus`: load transcripts, labels, and splits; print stats
//! - `render_prompts`: show the exact prompts both steps send
//! - `mock_chat`: the offline mock endpoint and its score round trip
//! - `generate_synthetic`: the full two-step pipeline, library-level
//! - `embed_cache`: hashing embedder plus the content-addressed cache
//! - `evaluate_reports`: utility, fidelity, privacy, and histograms
//!
//! Determinism is load-bearing throughout: given one config and seed,
//! generation under a mock transport and every evaluation artifact are
//! byte-identical across reruns.

pub mod client;
pub mod commands;
pub mod config;
pub mod corpus;
pub mod embedding;
pub mod eval;
pub mod fixture;
pub mod mock;
pub mod pipeline;
pub mod prompt;
pub mod rng;
