//! Judge backends: live chat-completion HTTP, deterministic mock, and
//! transcript replay.

use super::transcript::{read_transcript, replay_key, temperature_key, TranscriptError};
use super::RequestEnvelope;
use crate::util::sha256_parts;
use std::collections::HashMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BackendError {
    /// Worth retrying: network failures, rate-limit responses, 5xx.
    #[error("transient backend failure: {0}")]
    Transient(String),
    #[error("authentication failure: {0}")]
    Auth(String),
    #[error("backend configuration error: {0}")]
    Config(String),
    /// Replay only: the key was never recorded. Never retried and never
    /// falls through to a live call.
    #[error("no recording for key {0}")]
    MissingRecording(String),
}

/// A judge that turns a prompt bundle into raw text. Implementations must be
/// safe for concurrent use.
pub trait JudgeBackend: Send + Sync {
    fn complete(&self, request: &RequestEnvelope) -> Result<String, BackendError>;
}

// ---------------------------------------------------------------- mock

const MOCK_JUSTIFICATIONS: [&str; 6] = [
    "The innovator response gives concrete, verifiable detail for this criterion, and the tool summary corroborates it.",
    "Evidence is present but thin; the response asserts the practice without describing how it is implemented or verified.",
    "The response addresses the question only indirectly, so the rating reflects partial coverage of the criterion.",
    "Documentation referenced in the response could not be weighed here, which limits how much credit the evidence supports.",
    "The response describes early-stage work; plans are credible but outcomes are not yet demonstrated.",
    "No substantive evidence accompanies this answer, leaving the criterion largely unsupported.",
];

/// Deterministic stand-in for a live judge: the score is a stable hash of
/// (content_hash, model_id, temperature, seed) mapped into 0-5, and the
/// output is always well-formed for the parser.
pub struct MockBackend {
    seed: u64,
}

pub fn mock_backend(seed: u64) -> MockBackend {
    MockBackend { seed }
}

impl JudgeBackend for MockBackend {
    fn complete(&self, request: &RequestEnvelope) -> Result<String, BackendError> {
        let digest = sha256_parts(&[
            &request.bundle.content_hash,
            &request.provider.model_id,
            &temperature_key(request.provider.temperature),
            &self.seed.to_string(),
        ]);
        let bytes = hex::decode(&digest).expect("hex digest");
        let value = u64::from_be_bytes(bytes[..8].try_into().unwrap());
        let score = value % 6;
        let justification = MOCK_JUSTIFICATIONS[((value / 6) % 6) as usize];
        Ok(format!(
            "Score: {score}\n{justification} (tool {}, unit {})",
            request.bundle.tool_id, request.bundle.indicator_id
        ))
    }
}

// ---------------------------------------------------------------- replay

/// Serves recorded raw text keyed by (tool, unit, model, temperature,
/// content_hash).
pub struct ReplayBackend {
    records: HashMap<String, String>,
}

pub fn replay_backend(transcript_path: &Path) -> Result<ReplayBackend, TranscriptError> {
    let records = read_transcript(transcript_path)?;
    let mut map = HashMap::with_capacity(records.len());
    for record in records {
        // later records supersede earlier ones for the same key
        map.insert(record.replay_key(), record.raw_text);
    }
    Ok(ReplayBackend { records: map })
}

impl JudgeBackend for ReplayBackend {
    fn complete(&self, request: &RequestEnvelope) -> Result<String, BackendError> {
        let key = replay_key(
            &request.bundle.tool_id,
            &request.bundle.indicator_id,
            &request.provider.model_id,
            request.provider.temperature,
            &request.bundle.content_hash,
        );
        self.records
            .get(&key)
            .cloned()
            .ok_or(BackendError::MissingRecording(key))
    }
}

// ---------------------------------------------------------------- live

/// Generic chat-completion wire body. The temperature key is omitted
/// entirely when absent, so reasoning providers never see one.
pub fn wire_body(request: &RequestEnvelope) -> serde_json::Value {
    let mut body = serde_json::json!({
        "model": request.provider.model_id,
        "messages": [
            {"role": "system", "content": request.bundle.system_message},
            {"role": "user", "content": request.bundle.user_message},
        ],
        "top_p": request.provider.top_p,
        "max_tokens": request.provider.max_output_tokens,
    });
    if let Some(t) = request.provider.temperature {
        body["temperature"] = serde_json::json!(t);
    }
    body
}

/// One adapter for all chat-completion style vendors; provider-specific
/// quirks stay in `ProviderConfig` (endpoint, credentials env var).
pub struct LiveBackend {
    client: reqwest::blocking::Client,
}

pub fn live_backend() -> LiveBackend {
    LiveBackend {
        client: reqwest::blocking::Client::new(),
    }
}

impl JudgeBackend for LiveBackend {
    fn complete(&self, request: &RequestEnvelope) -> Result<String, BackendError> {
        let endpoint = request
            .provider
            .endpoint
            .as_deref()
            .ok_or_else(|| BackendError::Config("live backend requires an endpoint".into()))?;
        let cred_var = request.provider.credentials_ref.as_deref().ok_or_else(|| {
            BackendError::Config("live backend requires credentials_ref".into())
        })?;
        let key = std::env::var(cred_var).map_err(|_| {
            BackendError::Auth(format!("credential environment variable {cred_var} not set"))
        })?;

        let response = self
            .client
            .post(endpoint)
            .bearer_auth(key)
            .json(&wire_body(request))
            .send()
            .map_err(|e| BackendError::Transient(e.to_string()))?;

        let status = response.status();
        if status.as_u16() == 401 || status.as_u16() == 403 {
            return Err(BackendError::Auth(format!("provider returned {status}")));
        }
        if status.as_u16() == 429 || status.is_server_error() {
            return Err(BackendError::Transient(format!("provider returned {status}")));
        }
        if !status.is_success() {
            return Err(BackendError::Config(format!("provider returned {status}")));
        }

        let body: serde_json::Value = response
            .json()
            .map_err(|e| BackendError::Transient(format!("unparseable response body: {e}")))?;
        body["choices"][0]["message"]["content"]
            .as_str()
            .map(|s| s.to_string())
            .ok_or_else(|| {
                BackendError::Transient("response missing choices[0].message.content".into())
            })
    }
}
