//! Chat-completions client: wire protocol, generation parameters, retry
//! policy, and the transport abstraction the mock plugs into.
//!
//! The client retries transport failures and HTTP 429/5xx with exponential
//! backoff. 401/403 fail immediately. Servers that reject the
//! `repetition_penalty` extension field with 400/422 get one fallback
//! request without it; the omission is flagged on the returned exchange.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Knobs sent with every completion request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationParams {
    pub max_tokens: u32,
    pub repetition_penalty: f64,
    pub temperature: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub request_seed: Option<u64>,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams {
            max_tokens: 350,
            repetition_penalty: 1.175,
            temperature: 0.9,
            request_seed: None,
        }
    }
}

impl GenerationParams {
    /// Check invariants. `allow_token_escape` lifts the 300..=400
    /// max_tokens band for deliberate out-of-band experiments.
    pub fn validate(&self, allow_token_escape: bool) -> Result<(), ClientError> {
        if !allow_token_escape && !(300..=400).contains(&self.max_tokens) {
            return Err(ClientError::InvalidParams(format!(
                "max_tokens {} outside 300..=400 (pass the escape flag to override)",
                self.max_tokens
            )));
        }
        if !self.repetition_penalty.is_finite() || self.repetition_penalty <= 0.0 {
            return Err(ClientError::InvalidParams(format!(
                "repetition_penalty {} must be positive",
                self.repetition_penalty
            )));
        }
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(ClientError::InvalidParams(format!(
                "temperature {} must be a non-negative finite number",
                self.temperature
            )));
        }
        Ok(())
    }
}

/// Where and how to reach the endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EndpointConfig {
    pub base_url: String,
    pub model_name: String,
    /// Name of the environment variable holding the bearer token.
    pub api_key_source: String,
    pub timeout_s: u64,
    pub max_retries: u32,
    pub backoff_base_ms: u64,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        EndpointConfig {
            base_url: "http://127.0.0.1:8000".into(),
            model_name: "default-model".into(),
            api_key_source: "INFERENCE_API_KEY".into(),
            timeout_s: 60,
            max_retries: 3,
            backoff_base_ms: 250,
        }
    }
}

impl EndpointConfig {
    pub fn validate(&self) -> Result<(), ClientError> {
        if self.timeout_s == 0 {
            return Err(ClientError::InvalidParams(
                "timeout_s must be positive".into(),
            ));
        }
        if self.base_url.trim().is_empty() {
            return Err(ClientError::InvalidParams(
                "base_url must be non-empty".into(),
            ));
        }
        Ok(())
    }
}

/// One completed request/response round trip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatExchange {
    pub system_text: String,
    pub user_text: String,
    pub params: GenerationParams,
    pub response_text: String,
    pub latency_ms: u64,
    pub attempt_count: u32,
    /// True when the server rejected `repetition_penalty` and the
    /// exchange succeeded without it.
    pub repetition_penalty_omitted: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("transport failed after {attempts} attempt(s): {last}")]
    TransportError { attempts: u32, last: String },
    #[error("protocol error: {0}")]
    ProtocolError(String),
    #[error("authentication rejected with HTTP {0}")]
    AuthError(u16),
    #[error("request timed out after {attempts} attempt(s)")]
    TimeoutError { attempts: u32 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

/// Fully assembled request, ready for the wire.
#[derive(Debug, Clone, PartialEq)]
pub struct ChatRequest {
    pub model: String,
    pub system_text: String,
    pub user_text: String,
    pub params: GenerationParams,
    pub include_repetition_penalty: bool,
}

impl ChatRequest {
    /// JSON body for `POST {base_url}/v1/chat/completions`.
    ///
    /// The api key never appears here; it travels only in the
    /// authorization header.
    pub fn to_body(&self) -> Value {
        let mut body = serde_json::json!({
            "model": self.model,
            "messages": [
                {"role": "system", "content": self.system_text},
                {"role": "user", "content": self.user_text},
            ],
            "max_tokens": self.params.max_tokens,
            "temperature": self.params.temperature,
        });
        if let Some(seed) = self.params.request_seed {
            body["seed"] = seed.into();
        }
        if self.include_repetition_penalty {
            body["repetition_penalty"] = self.params.repetition_penalty.into();
        }
        body
    }
}

/// Raw HTTP-level response before chat-schema interpretation.
#[derive(Debug, Clone, PartialEq)]
pub struct WireResponse {
    pub status: u16,
    pub body: String,
}

/// Failure below the HTTP layer.
#[derive(Debug, Clone, PartialEq)]
pub enum WireError {
    Timeout,
    Transport(String),
}

/// Anything that can carry a [`ChatRequest`] and return a wire response.
pub trait ChatTransport: Send + Sync {
    fn send(&self, req: &ChatRequest) -> Result<WireResponse, WireError>;
}

/// Real HTTP transport over `{base_url}/v1/chat/completions`.
pub struct HttpTransport {
    agent: ureq::Agent,
    url: String,
    bearer: Option<String>,
}

impl HttpTransport {
    /// Reads the api key from the environment variable named by
    /// `cfg.api_key_source`; an unset variable means no auth header.
    pub fn new(cfg: &EndpointConfig) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(cfg.timeout_s)))
            .build()
            .into();
        HttpTransport {
            agent,
            url: format!("{}/v1/chat/completions", cfg.base_url.trim_end_matches('/')),
            bearer: std::env::var(&cfg.api_key_source).ok(),
        }
    }
}

impl ChatTransport for HttpTransport {
    fn send(&self, req: &ChatRequest) -> Result<WireResponse, WireError> {
        let mut builder = self.agent.post(&self.url);
        if let Some(key) = &self.bearer {
            builder = builder.header("authorization", format!("Bearer {key}"));
        }
        match builder.send_json(req.to_body()) {
            Ok(mut resp) => {
                let status = resp.status().as_u16();
                let body = resp
                    .body_mut()
                    .read_to_string()
                    .map_err(|e| WireError::Transport(format!("reading body: {e}")))?;
                Ok(WireResponse { status, body })
            }
            Err(ureq::Error::Timeout(_)) => Err(WireError::Timeout),
            Err(e) => Err(WireError::Transport(e.to_string())),
        }
    }
}

/// Chat client binding a transport to an endpoint's retry policy.
pub struct ChatClient {
    cfg: EndpointConfig,
    transport: Box<dyn ChatTransport>,
    allow_token_escape: bool,
    /// Report latency as 0 so downstream artifacts are byte-deterministic
    /// (set for mock transports).
    zero_latency: bool,
}

impl ChatClient {
    pub fn http(cfg: EndpointConfig) -> Result<Self, ClientError> {
        cfg.validate()?;
        let transport = HttpTransport::new(&cfg);
        Ok(ChatClient {
            cfg,
            transport: Box::new(transport),
            allow_token_escape: false,
            zero_latency: false,
        })
    }

    /// Client over an arbitrary transport. `deterministic` controls
    /// latency zeroing.
    pub fn over(
        cfg: EndpointConfig,
        transport: Box<dyn ChatTransport>,
        deterministic: bool,
    ) -> Result<Self, ClientError> {
        cfg.validate()?;
        Ok(ChatClient {
            cfg,
            transport,
            allow_token_escape: false,
            zero_latency: deterministic,
        })
    }

    pub fn allow_token_escape(mut self, allow: bool) -> Self {
        self.allow_token_escape = allow;
        self
    }

    pub fn model_name(&self) -> &str {
        &self.cfg.model_name
    }

    /// True when latencies are zeroed for byte-deterministic artifacts.
    pub fn is_deterministic(&self) -> bool {
        self.zero_latency
    }

    /// One completion with retries.
    ///
    /// Transport failures and HTTP 429/5xx retry with exponential backoff
    /// up to `max_retries`; 401/403 fail immediately; a 400/422 while the
    /// `repetition_penalty` extension is present triggers one fallback
    /// without it.
    pub fn complete(
        &self,
        system_text: &str,
        user_text: &str,
        params: &GenerationParams,
    ) -> Result<ChatExchange, ClientError> {
        params.validate(self.allow_token_escape)?;
        if user_text.trim().is_empty() {
            return Err(ClientError::InvalidRequest("user text is empty".into()));
        }

        let start = Instant::now();
        let mut include_penalty = true;
        let mut attempts = 0u32;
        let mut retries = 0u32;
        loop {
            attempts += 1;
            let req = ChatRequest {
                model: self.cfg.model_name.clone(),
                system_text: system_text.to_string(),
                user_text: user_text.to_string(),
                params: params.clone(),
                include_repetition_penalty: include_penalty,
            };
            let failure = match self.transport.send(&req) {
                Ok(resp) => match resp.status {
                    200..=299 => {
                        let content = extract_content(&resp.body)?;
                        let latency_ms = if self.zero_latency {
                            0
                        } else {
                            start.elapsed().as_millis() as u64
                        };
                        return Ok(ChatExchange {
                            system_text: system_text.to_string(),
                            user_text: user_text.to_string(),
                            params: params.clone(),
                            response_text: content,
                            latency_ms,
                            attempt_count: attempts,
                            repetition_penalty_omitted: !include_penalty,
                        });
                    }
                    401 | 403 => return Err(ClientError::AuthError(resp.status)),
                    429 => WireError::Transport(format!("HTTP 429: {}", truncate(&resp.body))),
                    500..=599 => WireError::Transport(format!(
                        "HTTP {}: {}",
                        resp.status,
                        truncate(&resp.body)
                    )),
                    400 | 422 if include_penalty => {
                        // Likely the extension field; reissue without it.
                        include_penalty = false;
                        continue;
                    }
                    other => {
                        return Err(ClientError::ProtocolError(format!(
                            "unexpected HTTP {other}: {}",
                            truncate(&resp.body)
                        )))
                    }
                },
                Err(e) => e,
            };
            if retries >= self.cfg.max_retries {
                return Err(match failure {
                    WireError::Timeout => ClientError::TimeoutError { attempts },
                    WireError::Transport(last) => ClientError::TransportError { attempts, last },
                });
            }
            let delay = self
                .cfg
                .backoff_base_ms
                .saturating_mul(1u64 << retries.min(16));
            if delay > 0 {
                std::thread::sleep(Duration::from_millis(delay));
            }
            retries += 1;
        }
    }
}

fn truncate(body: &str) -> String {
    const LIMIT: usize = 200;
    if body.len() <= LIMIT {
        body.to_string()
    } else {
        let mut end = LIMIT;
        while !body.is_char_boundary(end) {
            end -= 1;
        }
        format!("{}…", &body[..end])
    }
}

/// Pull `choices[0].message.content` out of a response body.
fn extract_content(body: &str) -> Result<String, ClientError> {
    let value: Value = serde_json::from_str(body)
        .map_err(|e| ClientError::ProtocolError(format!("response is not JSON: {e}")))?;
    value
        .get("choices")
        .and_then(|c| c.get(0))
        .and_then(|c| c.get("message"))
        .and_then(|m| m.get("content"))
        .and_then(|c| c.as_str())
        .map(str::to_string)
        .ok_or_else(|| {
            ClientError::ProtocolError(format!(
                "response missing choices[0].message.content: {}",
                truncate(body)
            ))
        })
}

/// Wrap assistant text in the wire schema (shared by mock and tests).
pub fn wire_body_with_content(content: &str) -> String {
    serde_json::json!({
        "choices": [{"message": {"role": "assistant", "content": content}}]
    })
    .to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicU32, Ordering};

    struct ScriptedTransport {
        responses: Vec<Result<WireResponse, WireError>>,
        cursor: AtomicU32,
    }

    impl ScriptedTransport {
        fn new(responses: Vec<Result<WireResponse, WireError>>) -> Self {
            ScriptedTransport {
                responses,
                cursor: AtomicU32::new(0),
            }
        }
    }

    impl ChatTransport for ScriptedTransport {
        fn send(&self, _req: &ChatRequest) -> Result<WireResponse, WireError> {
            let i = self.cursor.fetch_add(1, Ordering::SeqCst) as usize;
            self.responses[i.min(self.responses.len() - 1)].clone()
        }
    }

    fn fast_cfg(max_retries: u32) -> EndpointConfig {
        EndpointConfig {
            max_retries,
            backoff_base_ms: 0,
            ..EndpointConfig::default()
        }
    }

    fn ok(content: &str) -> Result<WireResponse, WireError> {
        Ok(WireResponse {
            status: 200,
            body: wire_body_with_content(content),
        })
    }

    #[test]
    fn default_params_match_reported_settings() {
        let p = GenerationParams::default();
        assert_eq!(p.max_tokens, 350);
        assert_eq!(p.repetition_penalty, 1.175);
        assert_eq!(p.temperature, 0.9);
        assert!(p.validate(false).is_ok());
    }

    #[test]
    fn params_outside_band_need_escape() {
        let p = GenerationParams {
            max_tokens: 500,
            ..GenerationParams::default()
        };
        assert!(matches!(
            p.validate(false),
            Err(ClientError::InvalidParams(_))
        ));
        assert!(p.validate(true).is_ok());
    }

    #[test]
    fn params_reject_nonpositive_penalty() {
        let p = GenerationParams {
            repetition_penalty: 0.0,
            ..GenerationParams::default()
        };
        assert!(matches!(
            p.validate(false),
            Err(ClientError::InvalidParams(_))
        ));
    }

    #[test]
    fn body_contains_protocol_fields_and_no_key() {
        let req = ChatRequest {
            model: "m1".into(),
            system_text: "sys".into(),
            user_text: "usr".into(),
            params: GenerationParams {
                request_seed: Some(11),
                ..GenerationParams::default()
            },
            include_repetition_penalty: true,
        };
        let body = req.to_body();
        assert_eq!(body["model"], "m1");
        assert_eq!(body["messages"][0]["role"], "system");
        assert_eq!(body["messages"][1]["content"], "usr");
        assert_eq!(body["max_tokens"], 350);
        assert_eq!(body["seed"], 11);
        assert_eq!(body["repetition_penalty"], 1.175);
        assert!(!body.to_string().contains("SECRET"));
    }

    #[test]
    fn body_omits_penalty_when_flagged_off() {
        let req = ChatRequest {
            model: "m1".into(),
            system_text: "sys".into(),
            user_text: "usr".into(),
            params: GenerationParams::default(),
            include_repetition_penalty: false,
        };
        assert!(req.to_body().get("repetition_penalty").is_none());
    }

    #[test]
    fn success_on_first_attempt() {
        let client = ChatClient::over(
            fast_cfg(3),
            Box::new(ScriptedTransport::new(vec![ok("OK")])),
            true,
        )
        .unwrap();
        let ex = client
            .complete("sys", "OK", &GenerationParams::default())
            .unwrap();
        assert_eq!(ex.response_text, "OK");
        assert_eq!(ex.attempt_count, 1);
        assert_eq!(ex.latency_ms, 0);
        assert!(!ex.repetition_penalty_omitted);
    }

    #[test]
    fn fail_twice_then_succeed_with_three_attempts() {
        let fail = Err(WireError::Transport("no route".into()));
        let client = ChatClient::over(
            fast_cfg(3),
            Box::new(ScriptedTransport::new(vec![fail.clone(), fail, ok("done")])),
            true,
        )
        .unwrap();
        let ex = client
            .complete("sys", "hello", &GenerationParams::default())
            .unwrap();
        assert_eq!(ex.response_text, "done");
        assert_eq!(ex.attempt_count, 3);
    }

    #[test]
    fn retries_exhaust_into_transport_error() {
        let fail: Result<WireResponse, WireError> = Err(WireError::Transport("down".into()));
        let client = ChatClient::over(
            fast_cfg(2),
            Box::new(ScriptedTransport::new(vec![fail])),
            true,
        )
        .unwrap();
        match client.complete("sys", "hello", &GenerationParams::default()) {
            Err(ClientError::TransportError { attempts: 3, last }) => {
                assert!(last.contains("down"));
            }
            other => panic!("expected TransportError after 3 attempts, got {other:?}"),
        }
    }

    #[test]
    fn timeout_classified_separately() {
        let client = ChatClient::over(
            fast_cfg(0),
            Box::new(ScriptedTransport::new(vec![Err(WireError::Timeout)])),
            true,
        )
        .unwrap();
        assert!(matches!(
            client.complete("sys", "hello", &GenerationParams::default()),
            Err(ClientError::TimeoutError { attempts: 1 })
        ));
    }

    #[test]
    fn http_500_retries_then_succeeds() {
        let five_hundred = Ok(WireResponse {
            status: 500,
            body: "oops".into(),
        });
        let client = ChatClient::over(
            fast_cfg(2),
            Box::new(ScriptedTransport::new(vec![five_hundred, ok("recovered")])),
            true,
        )
        .unwrap();
        let ex = client
            .complete("sys", "hello", &GenerationParams::default())
            .unwrap();
        assert_eq!(ex.response_text, "recovered");
        assert_eq!(ex.attempt_count, 2);
    }

    #[test]
    fn auth_failure_is_not_retried() {
        let unauthorized = Ok(WireResponse {
            status: 401,
            body: "denied".into(),
        });
        let client = ChatClient::over(
            fast_cfg(5),
            Box::new(ScriptedTransport::new(vec![unauthorized, ok("never")])),
            true,
        )
        .unwrap();
        assert!(matches!(
            client.complete("sys", "hello", &GenerationParams::default()),
            Err(ClientError::AuthError(401))
        ));
    }

    #[test]
    fn missing_choices_is_protocol_error() {
        let empty = Ok(WireResponse {
            status: 200,
            body: "{}".into(),
        });
        let client = ChatClient::over(
            fast_cfg(0),
            Box::new(ScriptedTransport::new(vec![empty])),
            true,
        )
        .unwrap();
        assert!(matches!(
            client.complete("sys", "hello", &GenerationParams::default()),
            Err(ClientError::ProtocolError(_))
        ));
    }

    #[test]
    fn penalty_rejection_falls_back_without_it() {
        struct PenaltyRejecting {
            saw_fallback: AtomicU32,
        }
        impl ChatTransport for PenaltyRejecting {
            fn send(&self, req: &ChatRequest) -> Result<WireResponse, WireError> {
                if req.include_repetition_penalty {
                    Ok(WireResponse {
                        status: 400,
                        body: "unknown field".into(),
                    })
                } else {
                    self.saw_fallback.fetch_add(1, Ordering::SeqCst);
                    Ok(WireResponse {
                        status: 200,
                        body: wire_body_with_content("ok"),
                    })
                }
            }
        }
        let client = ChatClient::over(
            fast_cfg(0),
            Box::new(PenaltyRejecting {
                saw_fallback: AtomicU32::new(0),
            }),
            true,
        )
        .unwrap();
        let ex = client
            .complete("sys", "hello", &GenerationParams::default())
            .unwrap();
        assert!(ex.repetition_penalty_omitted);
        assert_eq!(ex.response_text, "ok");
        assert_eq!(ex.attempt_count, 2);
    }

    #[test]
    fn empty_user_text_rejected_before_any_send() {
        struct Panicking;
        impl ChatTransport for Panicking {
            fn send(&self, _req: &ChatRequest) -> Result<WireResponse, WireError> {
                panic!("transport must not be reached");
            }
        }
        let client = ChatClient::over(fast_cfg(0), Box::new(Panicking), true).unwrap();
        assert!(matches!(
            client.complete("sys", "   ", &GenerationParams::default()),
            Err(ClientError::InvalidRequest(_))
        ));
    }

    #[test]
    fn zero_timeout_config_rejected() {
        let cfg = EndpointConfig {
            timeout_s: 0,
            ..EndpointConfig::default()
        };
        assert!(matches!(
            ChatClient::over(cfg, Box::new(Panicky), true),
            Err(ClientError::InvalidParams(_))
        ));
        struct Panicky;
        impl ChatTransport for Panicky {
            fn send(&self, _req: &ChatRequest) -> Result<WireResponse, WireError> {
                unreachable!()
            }
        }
    }
}
