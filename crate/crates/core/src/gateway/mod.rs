//! Dispatches prompt bundles to judge backends under the rate/retry/sampling
//! contract: 20 requests per minute, 2.5 s between calls, up to five
//! automatic retries with exponential backoff and jitter, top-p 0.9.
//!
//! Time is injected (see [`clock`]) so the whole contract is testable on a
//! simulated clock with zero wall-time. The limiter is global per run by
//! default, shared across providers and worker threads.

pub mod backend;
pub mod clock;
pub mod limiter;
pub mod transcript;

use crate::prompt::PromptBundle;
use crate::util::sha256_parts;
use backend::{BackendError, JudgeBackend};
use clock::Clock;
use limiter::RateLimiter;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::Duration;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    /// Exposes temperature; swept across the configured temperature list.
    Stochastic,
    /// No temperature parameter; runs exactly once per sweep.
    Reasoning,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProviderConfig {
    pub provider_name: String,
    pub model_id: String,
    pub kind: ProviderKind,
    /// Required iff kind is stochastic. In sweep configs it may be omitted
    /// for stochastic providers; the sweep fills it per temperature cell.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[serde(default = "default_top_p")]
    pub top_p: f64,
    #[serde(default = "default_max_output_tokens")]
    pub max_output_tokens: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<String>,
    /// Name of the environment variable holding the credential; credentials
    /// never live in files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub credentials_ref: Option<String>,
}

fn default_top_p() -> f64 {
    0.9
}

fn default_max_output_tokens() -> u32 {
    2048
}

impl ProviderConfig {
    pub fn with_temperature(&self, temperature: f64) -> ProviderConfig {
        ProviderConfig {
            temperature: Some(temperature),
            ..self.clone()
        }
    }

    /// Invariants that hold for any config, swept or not: a reasoning
    /// provider never carries a temperature, top_p stays in (0, 1].
    pub fn validate_base(&self) -> Result<(), String> {
        if self.kind == ProviderKind::Reasoning && self.temperature.is_some() {
            return Err(format!(
                "provider {} is a reasoning model; constructing it with a temperature is an error",
                self.model_id
            ));
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return Err(format!(
                "provider {}: top_p {} outside (0, 1]",
                self.model_id, self.top_p
            ));
        }
        if let Some(t) = self.temperature {
            if !(0.0..=2.0).contains(&t) {
                return Err(format!(
                    "provider {}: temperature {t} outside [0, 2]",
                    self.model_id
                ));
            }
        }
        Ok(())
    }

    /// Dispatch-time invariants: base checks plus stochastic providers must
    /// carry their effective temperature.
    pub fn validate_dispatch(&self) -> Result<(), String> {
        self.validate_base()?;
        if self.kind == ProviderKind::Stochastic && self.temperature.is_none() {
            return Err(format!(
                "stochastic provider {} dispatched without a temperature",
                self.model_id
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BackoffPolicy {
    ExponentialJitter {
        #[serde(default = "default_backoff_base")]
        base_seconds: f64,
        #[serde(default = "default_backoff_cap")]
        cap_seconds: f64,
    },
}

fn default_backoff_base() -> f64 {
    1.0
}

fn default_backoff_cap() -> f64 {
    30.0
}

impl Default for BackoffPolicy {
    fn default() -> Self {
        BackoffPolicy::ExponentialJitter {
            base_seconds: default_backoff_base(),
            cap_seconds: default_backoff_cap(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimiterScope {
    /// One limiter shared by every provider in the run (the default).
    #[default]
    Global,
    PerProvider,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispatchPolicy {
    pub requests_per_minute: u32,
    /// Seconds between consecutive request starts.
    pub min_inter_call_delay: f64,
    /// Retries, not total attempts: total attempts <= 1 + max_retries.
    pub max_retries: u32,
    pub backoff: BackoffPolicy,
    pub scope: LimiterScope,
}

impl Default for DispatchPolicy {
    fn default() -> Self {
        DispatchPolicy {
            requests_per_minute: 20,
            min_inter_call_delay: 2.5,
            max_retries: 5,
            backoff: BackoffPolicy::default(),
            scope: LimiterScope::Global,
        }
    }
}

impl DispatchPolicy {
    pub fn validate(&self) -> Result<(), String> {
        if self.requests_per_minute == 0 {
            return Err("requests_per_minute must be positive".into());
        }
        if self.min_inter_call_delay <= 0.0 || !self.min_inter_call_delay.is_finite() {
            return Err("min_inter_call_delay must be positive".into());
        }
        let BackoffPolicy::ExponentialJitter {
            base_seconds,
            cap_seconds,
        } = self.backoff;
        if base_seconds <= 0.0 || cap_seconds <= 0.0 {
            return Err("backoff delays must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RequestEnvelope {
    /// Unique per run; also the deterministic seed component for jitter.
    pub request_id: String,
    pub bundle: PromptBundle,
    /// The effective per-cell provider config (temperature filled in).
    pub provider: ProviderConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseEnvelope {
    pub request_id: String,
    /// Verbatim judge output, never trimmed.
    pub raw_text: String,
    /// Total attempts made, <= 1 + max_retries.
    pub attempts: u32,
    pub latency: Duration,
    pub provider_name: String,
    /// Absent iff the provider is a reasoning model.
    pub temperature_used: Option<f64>,
}

#[derive(Debug, Error)]
pub enum DispatchError {
    #[error("retries exhausted after {attempts} attempts; last failure: {last}")]
    RetriesExhausted { attempts: u32, last: String },
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("missing recording: {0}")]
    MissingRecording(String),
}

enum Limiters {
    Global(Arc<RateLimiter>),
    PerProvider(Mutex<HashMap<String, Arc<RateLimiter>>>),
}

/// The dispatcher: one backend, one (global) limiter, one clock. Safe to
/// call from multiple workers; the limiter serializes admission.
pub struct Gateway {
    backend: Box<dyn JudgeBackend>,
    limiters: Limiters,
    clock: Arc<dyn Clock>,
    policy: DispatchPolicy,
    jitter_seed: u64,
}

impl Gateway {
    pub fn new(
        backend: Box<dyn JudgeBackend>,
        clock: Arc<dyn Clock>,
        policy: DispatchPolicy,
        jitter_seed: u64,
    ) -> Result<Gateway, DispatchError> {
        policy.validate().map_err(DispatchError::Config)?;
        let make = || {
            Arc::new(RateLimiter::new(
                policy.requests_per_minute,
                Duration::from_secs_f64(policy.min_inter_call_delay),
            ))
        };
        let limiters = match policy.scope {
            LimiterScope::Global => Limiters::Global(make()),
            LimiterScope::PerProvider => Limiters::PerProvider(Mutex::new(HashMap::new())),
        };
        Ok(Gateway {
            backend,
            limiters,
            clock,
            policy,
            jitter_seed,
        })
    }

    pub fn clock(&self) -> &Arc<dyn Clock> {
        &self.clock
    }

    fn limiter_for(&self, provider_name: &str) -> Arc<RateLimiter> {
        match &self.limiters {
            Limiters::Global(limiter) => Arc::clone(limiter),
            Limiters::PerProvider(map) => {
                let mut map = map.lock().unwrap();
                Arc::clone(map.entry(provider_name.to_string()).or_insert_with(|| {
                    Arc::new(RateLimiter::new(
                        self.policy.requests_per_minute,
                        Duration::from_secs_f64(self.policy.min_inter_call_delay),
                    ))
                }))
            }
        }
    }

    /// Exponential backoff with deterministic jitter in [d/2, d], seeded by
    /// (run seed, request id, attempt) so resumed runs behave identically.
    fn backoff_delay(&self, request_id: &str, attempt: u32) -> Duration {
        let BackoffPolicy::ExponentialJitter {
            base_seconds,
            cap_seconds,
        } = self.policy.backoff;
        let exp = base_seconds * 2f64.powi(attempt as i32 - 1);
        let capped = exp.min(cap_seconds);
        let digest = sha256_parts(&[
            &self.jitter_seed.to_string(),
            request_id,
            &attempt.to_string(),
        ]);
        let bytes = hex::decode(&digest).expect("hex digest");
        let mut rng = ChaCha8Rng::seed_from_u64(u64::from_be_bytes(bytes[..8].try_into().unwrap()));
        let fraction: f64 = rng.gen_range(0.5..=1.0);
        Duration::from_secs_f64(capped * fraction)
    }

    /// Send one request, honoring the limiter and retry policy. The raw
    /// response text is returned verbatim.
    pub fn dispatch(&self, request: &RequestEnvelope) -> Result<ResponseEnvelope, DispatchError> {
        request
            .provider
            .validate_dispatch()
            .map_err(DispatchError::Config)?;
        let limiter = self.limiter_for(&request.provider.provider_name);
        let max_attempts = self.policy.max_retries + 1;
        let mut attempt = 0;
        loop {
            attempt += 1;
            let started = limiter.acquire(self.clock.as_ref());
            match self.backend.complete(request) {
                Ok(raw_text) => {
                    return Ok(ResponseEnvelope {
                        request_id: request.request_id.clone(),
                        raw_text,
                        attempts: attempt,
                        latency: self.clock.now().saturating_sub(started),
                        provider_name: request.provider.provider_name.clone(),
                        temperature_used: request.provider.temperature,
                    })
                }
                Err(BackendError::Transient(reason)) => {
                    if attempt >= max_attempts {
                        return Err(DispatchError::RetriesExhausted {
                            attempts: attempt,
                            last: reason,
                        });
                    }
                    self.clock.sleep(self.backoff_delay(&request.request_id, attempt));
                }
                Err(BackendError::Auth(reason)) => return Err(DispatchError::Auth(reason)),
                Err(BackendError::Config(reason)) => return Err(DispatchError::Config(reason)),
                Err(BackendError::MissingRecording(key)) => {
                    return Err(DispatchError::MissingRecording(key))
                }
            }
        }
    }
}
