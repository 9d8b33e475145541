use std::collections::HashMap;
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{Embedder, TokenEmbeddings};
use crate::error::EmbeddingError;
use crate::text_norm::NormalizedText;

/// Body of `POST /embed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedRequest {
    pub text: String,
    pub model: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceToken {
    pub start: usize,
    pub end: usize,
    pub vector: Vec<f64>,
}

/// Response of `POST /embed`: one entry per non-special token.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedResponse {
    pub dim: usize,
    pub tokens: Vec<ServiceToken>,
}

impl EmbedResponse {
    /// Checks the response against the text it was produced for.
    pub fn into_embeddings(self, text: &NormalizedText) -> Result<TokenEmbeddings, EmbeddingError> {
        if self.dim == 0 {
            return Err(EmbeddingError::Protocol("dim must be positive".into()));
        }
        let chars = text.chars();
        let len = chars.len();
        let mut covered = vec![false; len];
        for (i, t) in self.tokens.iter().enumerate() {
            if t.end > len {
                return Err(EmbeddingError::Protocol(format!(
                    "token {i} offsets ({}, {}) exceed text length {len}",
                    t.start, t.end
                )));
            }
            if t.start < t.end {
                covered[t.start..t.end].iter_mut().for_each(|c| *c = true);
            }
        }
        if let Some(pos) = (0..len).find(|&p| chars[p] != ' ' && !covered[p]) {
            return Err(EmbeddingError::Protocol(format!(
                "character {pos} is not covered by any token"
            )));
        }
        let (offsets, vectors) = self
            .tokens
            .into_iter()
            .map(|t| ((t.start, t.end), t.vector))
            .unzip();
        TokenEmbeddings::new(vectors, offsets, self.dim).map_err(|e| match e {
            EmbeddingError::DimensionMismatch { left, right } => EmbeddingError::Protocol(format!(
                "token vector of length {left} in a response declaring dim {right}"
            )),
            other => other,
        })
    }
}

/// Body of a ready `GET /health` response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HealthStatus {
    pub status: String,
    pub model: String,
    pub dim: usize,
}

/// HTTP client for the embedding service. Responses are memoized per text
/// for the lifetime of the client.
pub struct ServiceEmbedder {
    base_url: String,
    model: String,
    agent: ureq::Agent,
    max_attempts: u32,
    backoff: Duration,
    cache: Mutex<HashMap<String, TokenEmbeddings>>,
}

impl ServiceEmbedder {
    pub fn new(base_url: impl Into<String>, model: impl Into<String>) -> Self {
        let agent = ureq::AgentBuilder::new()
            .timeout_connect(Duration::from_secs(5))
            .timeout(Duration::from_secs(60))
            .build();
        Self {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            model: model.into(),
            agent,
            max_attempts: 3,
            backoff: Duration::from_millis(100),
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// Sets how many times a retryable failure is attempted in total, and
    /// the initial delay between attempts (doubled each time).
    pub fn with_retry(mut self, max_attempts: u32, backoff: Duration) -> Self {
        self.max_attempts = max_attempts.max(1);
        self.backoff = backoff;
        self
    }

    pub fn endpoint(&self) -> String {
        format!("{}/embed", self.base_url)
    }

    /// Single `GET /health` probe, no retries. A 503 (model still loading)
    /// comes back as a retryable transport error.
    pub fn health(&self) -> Result<HealthStatus, EmbeddingError> {
        let url = format!("{}/health", self.base_url);
        let fail = |retryable, status, message| EmbeddingError::Transport {
            url: url.clone(),
            attempts: 1,
            retryable,
            status,
            message,
        };
        match self.agent.get(&url).call() {
            Ok(resp) => resp
                .into_json::<HealthStatus>()
                .map_err(|e| EmbeddingError::Protocol(format!("undecodable health body: {e}"))),
            Err(ureq::Error::Status(code, _)) => {
                Err(fail(code == 503, Some(code), format!("HTTP {code}")))
            }
            Err(ureq::Error::Transport(t)) => Err(fail(true, None, t.to_string())),
        }
    }

    fn request_once(
        &self,
        body: &EmbedRequest,
    ) -> Result<EmbedResponse, (bool, Option<u16>, String)> {
        match self.agent.post(&self.endpoint()).send_json(body) {
            Ok(resp) if resp.status() == 200 => resp
                .into_json::<EmbedResponse>()
                .map_err(|e| (false, Some(200), format!("undecodable body: {e}"))),
            Ok(resp) => Err((
                false,
                Some(resp.status()),
                format!("HTTP {}", resp.status()),
            )),
            Err(ureq::Error::Status(code, resp)) => {
                let detail = resp.into_string().unwrap_or_default();
                let retryable = code == 429 || code >= 500;
                Err((
                    retryable,
                    Some(code),
                    format!("HTTP {code} {}", detail.trim()),
                ))
            }
            Err(ureq::Error::Transport(t)) => Err((true, None, t.to_string())),
        }
    }
}

impl Embedder for ServiceEmbedder {
    fn embed_tokens(&self, text: &NormalizedText) -> Result<TokenEmbeddings, EmbeddingError> {
        if text.is_empty() {
            return Err(EmbeddingError::EmptyText);
        }
        if let Some(hit) = self
            .cache
            .lock()
            .expect("cache poisoned")
            .get(text.as_str())
        {
            return Ok(hit.clone());
        }
        let body = EmbedRequest {
            text: text.as_str().to_string(),
            model: self.model.clone(),
        };
        let mut delay = self.backoff;
        let mut attempt = 0;
        let response = loop {
            attempt += 1;
            match self.request_once(&body) {
                Ok(r) => break r,
                Err((retryable, status, message)) => {
                    if !retryable || attempt >= self.max_attempts {
                        return Err(EmbeddingError::Transport {
                            url: self.endpoint(),
                            attempts: attempt,
                            retryable,
                            status,
                            message,
                        });
                    }
                    std::thread::sleep(delay);
                    delay *= 2;
                }
            }
        };
        let emb = response.into_embeddings(text)?;
        self.cache
            .lock()
            .expect("cache poisoned")
            .insert(text.as_str().to_string(), emb.clone());
        Ok(emb)
    }

    fn model_id(&self) -> &str {
        &self.model
    }
}
