//! HTTP client for an external masked-token model.
//!
//! `POST <endpoint>/predict` with
//! `{"tokens": [..], "masked_positions": [..], "top_k": k|null}`; the reply is
//! `{"distributions": [[[token, prob], ..], ..]}` with one sparse
//! distribution per requested position. Tokens outside the local vocabulary
//! are folded into the unknown token. Each distribution must sum to 1 within
//! 1e-3 and is renormalized.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::ReconstructionBackend;
use crate::corpus::{TokenId, Vocabulary};
use crate::error::{Error, Result};

pub const WIRE_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictRequest {
    pub tokens: Vec<String>,
    pub masked_positions: Vec<usize>,
    pub top_k: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RemoteBackend {
    url: String,
    vocab: Vocabulary,
    top_k: Option<usize>,
    attempts: usize,
    agent: ureq::Agent,
}

impl RemoteBackend {
    /// `endpoint` is either the base URL or the full `/predict` URL.
    pub fn new(endpoint: &str, vocab: Vocabulary) -> Self {
        let trimmed = endpoint.trim_end_matches('/');
        let url = if trimmed.ends_with("/predict") {
            trimmed.to_string()
        } else {
            format!("{trimmed}/predict")
        };
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(60)))
            .build()
            .into();
        RemoteBackend {
            url,
            vocab,
            top_k: None,
            attempts: 3,
            agent,
        }
    }

    /// Asks the server to truncate each distribution to its top `k` entries.
    pub fn with_top_k(mut self, top_k: Option<usize>) -> Self {
        self.top_k = top_k;
        self
    }

    /// Total tries for transport failures (at least one).
    pub fn with_attempts(mut self, attempts: usize) -> Self {
        self.attempts = attempts.max(1);
        self
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    fn post(&self, request: &PredictRequest) -> Result<Value> {
        let transport = |message: String| Error::Transport {
            endpoint: self.url.clone(),
            message,
        };
        match self.agent.post(&self.url).send_json(request) {
            Ok(mut response) => response
                .body_mut()
                .read_json::<Value>()
                .map_err(|e| Error::Protocol(format!("response body is not JSON: {e}"))),
            Err(ureq::Error::StatusCode(code)) if code < 500 => {
                Err(Error::Protocol(format!("{} answered HTTP {code}", self.url)))
            }
            Err(e) => Err(transport(e.to_string())),
        }
    }
}

impl ReconstructionBackend for RemoteBackend {
    fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    fn predict(&self, tokens: &[TokenId], positions: &[usize]) -> Result<Vec<Vec<f64>>> {
        let request = PredictRequest {
            tokens: self.vocab.decode_all(tokens),
            masked_positions: positions.to_vec(),
            top_k: self.top_k,
        };
        let mut last = None;
        for _ in 0..self.attempts {
            match self.post(&request) {
                Ok(body) => return densify_response(&self.vocab, positions, &body),
                Err(e) if e.is_retriable() => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.expect("at least one attempt"))
    }
}

/// Validates a `/predict` reply and turns it into dense distributions.
pub fn densify_response(vocab: &Vocabulary, positions: &[usize], body: &Value) -> Result<Vec<Vec<f64>>> {
    let outer = body
        .get("distributions")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Protocol("reply has no \"distributions\" array".into()))?;
    if outer.len() < positions.len() {
        return Err(Error::Protocol(format!(
            "reply is missing position {} ({} distributions for {} positions)",
            positions[outer.len()],
            outer.len(),
            positions.len()
        )));
    }
    if outer.len() > positions.len() {
        return Err(Error::Protocol(format!(
            "reply has {} distributions for {} positions",
            outer.len(),
            positions.len()
        )));
    }
    positions
        .iter()
        .zip(outer)
        .map(|(&position, entry)| densify_one(vocab, position, entry))
        .collect()
}

fn densify_one(vocab: &Vocabulary, position: usize, entry: &Value) -> Result<Vec<f64>> {
    let bad = |message: String| Error::InvalidDistribution { position, message };
    let pairs = entry
        .as_array()
        .ok_or_else(|| bad("distribution is not an array".into()))?;
    let mut dense = vec![0.0; vocab.len()];
    for pair in pairs {
        let (surface, prob) = match pair.as_array().map(Vec::as_slice) {
            Some([Value::String(s), p]) => (s.as_str(), p.as_f64()),
            _ => return Err(bad(format!("entry {pair} is not a [token, probability] pair"))),
        };
        let prob = prob
            .filter(|p| p.is_finite() && *p >= 0.0)
            .ok_or_else(|| bad(format!("token {surface:?} has an invalid probability")))?;
        dense[vocab.encode(surface) as usize] += prob;
    }
    let sum: f64 = dense.iter().sum();
    if (sum - 1.0).abs() > WIRE_TOLERANCE {
        return Err(bad(format!("probabilities sum to {sum}")));
    }
    for p in &mut dense {
        *p /= sum;
    }
    Ok(dense)
}
