//! HTTP adapter speaking the common chat-completion wire shape: a message
//! list in, a single text reply out. Logprob echo uses the completions
//! shape with text offsets so the user-prompt window can be bracketed
//! exactly.

use std::time::Duration;

use serde::Deserialize;
use serde_json::json;

use super::chat::{ChatProvider, ChatRequest, ChatResponse, ProviderError};
use super::config::{LogprobBase, ProviderConfig};
use super::logprobs::LogprobProvider;
use super::retry::with_retry;
use crate::types::TokenLogProbTrace;

pub struct HttpProvider {
    config: ProviderConfig,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
}

#[derive(Deserialize)]
struct ChatCompletionReply {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
    #[serde(default)]
    finish_reason: Option<String>,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: String,
}

#[derive(Deserialize)]
struct CompletionReply {
    choices: Vec<CompletionChoice>,
}

#[derive(Deserialize)]
struct CompletionChoice {
    logprobs: Option<LogprobPayload>,
}

#[derive(Deserialize)]
struct LogprobPayload {
    tokens: Vec<String>,
    token_logprobs: Vec<Option<f64>>,
    text_offset: Vec<usize>,
}

fn transport(message: impl Into<String>) -> ProviderError {
    ProviderError::Transport {
        attempts: 1,
        message: message.into(),
    }
}

fn classify_status(status: reqwest::StatusCode, body: &str) -> ProviderError {
    // Timeouts and throttling are worth retrying; other 4xx are not.
    if status.is_server_error() || status.as_u16() == 408 || status.as_u16() == 429 {
        transport(format!("status {status}: {body}"))
    } else {
        ProviderError::Rejection(format!("status {status}: {body}"))
    }
}

impl HttpProvider {
    pub fn new(config: ProviderConfig) -> Self {
        let api_key = config.api_key();
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .expect("HTTP client builds");
        HttpProvider {
            config,
            api_key,
            client,
        }
    }

    pub fn config(&self) -> &ProviderConfig {
        &self.config
    }

    fn post(&self, url: &str, body: &serde_json::Value) -> Result<String, ProviderError> {
        let mut request = self.client.post(url).json(body);
        if let Some(key) = &self.api_key {
            request = request.bearer_auth(key);
        }
        let response = request
            .send()
            .map_err(|err| transport(format!("request to {url} failed: {err}")))?;
        let status = response.status();
        let text = response
            .text()
            .map_err(|err| transport(format!("reading response body failed: {err}")))?;
        if !status.is_success() {
            return Err(classify_status(status, &text));
        }
        Ok(text)
    }

    /// Message list for the wire, honoring the system-role capability: a
    /// provider without one gets the system text prepended to the user
    /// turn.
    fn messages(&self, request: &ChatRequest) -> Vec<serde_json::Value> {
        if request.system_prompt.is_empty() {
            vec![json!({"role": "user", "content": request.user_prompt})]
        } else if self.config.system_role {
            vec![
                json!({"role": "system", "content": request.system_prompt}),
                json!({"role": "user", "content": request.user_prompt}),
            ]
        } else {
            let merged = format!("{}\n{}", request.system_prompt, request.user_prompt);
            vec![json!({"role": "user", "content": merged})]
        }
    }
}

impl ChatProvider for HttpProvider {
    fn provider_id(&self) -> &str {
        &self.config.id
    }

    fn model_id(&self) -> &str {
        &self.config.model
    }

    fn max_in_flight(&self) -> Option<usize> {
        Some(self.config.max_in_flight)
    }

    fn chat(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        if request.max_new_tokens == 0 {
            return Err(ProviderError::InvalidRequest(
                "max_new_tokens must be at least 1".into(),
            ));
        }
        let mut body = json!({
            "model": self.config.model,
            "messages": self.messages(request),
            "max_tokens": request.max_new_tokens,
        });
        if let Some(t) = request.temperature {
            body["temperature"] = json!(t);
        }
        if let Some(p) = request.top_p {
            body["top_p"] = json!(p);
        }
        if let Some(s) = request.seed {
            body["seed"] = json!(s);
        }

        with_retry(&self.config.retry, |_| {
            let text = self.post(&self.config.endpoint, &body)?;
            let reply: ChatCompletionReply = serde_json::from_str(&text)
                .map_err(|err| ProviderError::Rejection(format!("malformed reply: {err}")))?;
            let choice = reply
                .choices
                .into_iter()
                .next()
                .ok_or_else(|| ProviderError::Rejection("reply carried no choices".into()))?;
            let truncated = choice
                .finish_reason
                .as_deref()
                .map(|reason| reason == "length");
            Ok(ChatResponse {
                text: choice.message.content,
                truncated,
            })
        })
    }
}

impl LogprobProvider for HttpProvider {
    fn echo_logprobs(
        &self,
        system_prompt: &str,
        user_prompt: &str,
    ) -> Result<TokenLogProbTrace, ProviderError> {
        if !self.config.logprobs {
            return Err(ProviderError::CapabilityUnsupported("prompt logprobs"));
        }
        if user_prompt.is_empty() {
            return Err(ProviderError::InvalidRequest("user prompt is empty".into()));
        }
        let context = if system_prompt.is_empty() {
            user_prompt.to_string()
        } else {
            format!("{system_prompt}\n{user_prompt}")
        };
        let user_start = context.len() - user_prompt.len();
        let body = json!({
            "model": self.config.model,
            "prompt": context,
            "max_tokens": 0,
            "echo": true,
            "logprobs": 0,
        });
        let endpoint = self
            .config
            .logprob_endpoint
            .as_deref()
            .unwrap_or(&self.config.endpoint);

        let payload = with_retry(&self.config.retry, |_| {
            let text = self.post(endpoint, &body)?;
            let reply: CompletionReply = serde_json::from_str(&text)
                .map_err(|err| ProviderError::Rejection(format!("malformed reply: {err}")))?;
            reply
                .choices
                .into_iter()
                .next()
                .and_then(|c| c.logprobs)
                .ok_or_else(|| ProviderError::Rejection("reply carried no logprobs".into()))
        })?;

        if payload.tokens.len() != payload.token_logprobs.len()
            || payload.tokens.len() != payload.text_offset.len()
        {
            return Err(ProviderError::Rejection(
                "logprob arrays have mismatched lengths".into(),
            ));
        }
        let k = payload
            .text_offset
            .iter()
            .position(|&offset| offset >= user_start)
            .ok_or_else(|| {
                ProviderError::Rejection("no token starts inside the user prompt".into())
            })?;
        if payload.text_offset[k] != user_start {
            return Err(ProviderError::Rejection(
                "token boundary does not align with the user prompt start".into(),
            ));
        }
        if payload.tokens.is_empty() {
            return Err(ProviderError::Rejection("reply carried no tokens".into()));
        }
        let m = payload.tokens.len() - 1;

        let scale = match self.config.logprob_base {
            LogprobBase::Natural => 1.0,
            LogprobBase::Base2 => std::f64::consts::LN_2,
        };
        let mut logprobs = Vec::with_capacity(payload.token_logprobs.len());
        for (i, value) in payload.token_logprobs.iter().enumerate() {
            match value {
                Some(v) => logprobs.push(v * scale),
                // The very first context token has no conditional
                // probability; it can never fall inside the window.
                None if i < k => logprobs.push(0.0),
                None => {
                    return Err(ProviderError::Rejection(format!(
                        "missing logprob for user token {i}"
                    )))
                }
            }
        }
        TokenLogProbTrace::new(payload.tokens, logprobs, k, m)
            .map_err(|err| ProviderError::Rejection(err.to_string()))
    }
}
