//! Blocking chat-completion client.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::limiter::RateLimiter;
use super::prompts::last_code_block;
use crate::error::{Error, Result};

pub const DEFAULT_API_KEY_ENV: &str = "CODEMARK_API_KEY";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProviderConfig {
    pub endpoint_url: String,
    pub model_name: String,
    pub api_key_env: String,
    pub temperature: f64,
    pub timeout_secs: u64,
    pub max_retries: u32,
    /// Requests per minute; `None` means unpaced.
    pub requests_per_minute: Option<u32>,
    pub max_in_flight: usize,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig {
            endpoint_url: "https://api.openai.com/v1/chat/completions".into(),
            model_name: "gpt-4o".into(),
            api_key_env: DEFAULT_API_KEY_ENV.into(),
            temperature: 0.0,
            timeout_secs: 60,
            max_retries: 3,
            requests_per_minute: Some(60),
            max_in_flight: 4,
        }
    }
}

impl ProviderConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(Error::InvalidArgument(format!(
                "temperature must be in [0, 2], got {}",
                self.temperature
            )));
        }
        if self.endpoint_url.is_empty() {
            return Err(Error::InvalidArgument("endpoint_url is empty".into()));
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct RemoteClient {
    config: ProviderConfig,
    agent: ureq::Agent,
    limiter: RateLimiter,
    requests: AtomicU64,
}

impl RemoteClient {
    pub fn new(config: ProviderConfig) -> Result<Self> {
        config.validate()?;
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(config.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        let limiter = RateLimiter::new(config.requests_per_minute, config.max_in_flight);
        Ok(RemoteClient {
            config,
            agent,
            limiter,
            requests: AtomicU64::new(0),
        })
    }

    pub fn config(&self) -> &ProviderConfig {
        &self.config
    }

    /// HTTP requests sent so far (retries included).
    pub fn requests_sent(&self) -> u64 {
        self.requests.load(Ordering::Relaxed)
    }

    fn api_key(&self) -> Result<String> {
        std::env::var(&self.config.api_key_env)
            .ok()
            .filter(|k| !k.is_empty())
            .ok_or_else(|| Error::MissingCredential(self.config.api_key_env.clone()))
    }

    fn network_error(&self, message: impl Into<String>) -> Error {
        Error::Network {
            endpoint: self.config.endpoint_url.clone(),
            message: message.into(),
        }
    }

    /// One request, no retries. Returns the assistant message text.
    fn complete_once(&self, system: &str, user: &str, key: &str) -> Result<String> {
        let body = json!({
            "model": self.config.model_name,
            "temperature": self.config.temperature,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
        });
        let _permit = self.limiter.acquire();
        self.requests.fetch_add(1, Ordering::Relaxed);
        let resp = self
            .agent
            .post(&self.config.endpoint_url)
            .header("Authorization", &format!("Bearer {key}"))
            .send_json(&body)
            .map_err(|e| self.network_error(e.to_string()))?;
        let status = resp.status();
        let text = resp
            .into_body()
            .read_to_string()
            .map_err(|e| self.network_error(e.to_string()))?;
        if !status.is_success() {
            let snippet: String = text.chars().take(200).collect();
            return Err(self.network_error(format!("HTTP {}: {snippet}", status.as_u16())));
        }
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| Error::ResponseParse(format!("response is not JSON: {e}")))?;
        v.pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| Error::ResponseParse("no choices[0].message.content in response".into()))
    }

    /// Sends a chat completion and post-processes the reply with `parse`,
    /// retrying transport and parse failures up to `max_retries` times.
    pub fn complete_with<T>(
        &self,
        system: &str,
        user: &str,
        parse: impl Fn(&str) -> Result<T>,
    ) -> Result<T> {
        let key = self.api_key()?;
        let mut last_err = None;
        for attempt in 0..=self.config.max_retries {
            if attempt > 0 {
                log::debug!("retrying request to {} (attempt {})", self.config.endpoint_url, attempt + 1);
            }
            match self.complete_once(system, user, &key).and_then(|r| parse(&r)) {
                Ok(v) => return Ok(v),
                Err(e @ (Error::Network { .. } | Error::ResponseParse(_))) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last_err.unwrap_or_else(|| self.network_error("no attempt made")))
    }

    pub fn complete(&self, system: &str, user: &str) -> Result<String> {
        self.complete_with(system, user, |r| Ok(r.to_string()))
    }

    /// Completion whose reply must contain a fenced code block.
    pub fn complete_code(&self, system: &str, user: &str) -> Result<String> {
        self.complete_with(system, user, |r| {
            last_code_block(r).ok_or_else(|| Error::ResponseParse("reply contains no fenced code block".into()))
        })
    }
}
