use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{PredictError, Prediction, PredictionRequest, Predictor};

pub const MODEL_ENDPOINT_ENV: &str = "EVOGRAD_MODEL_ENDPOINT";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemoteConfig {
    /// Base URL; requests go to `{endpoint}/score`.
    pub endpoint: String,
    pub max_in_flight: usize,
    pub timeout: Duration,
    pub retries: u32,
    pub backoff: Duration,
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            max_in_flight: 4,
            timeout: Duration::from_secs(10),
            retries: 2,
            backoff: Duration::from_millis(100),
        }
    }

    pub fn from_env() -> Option<Self> {
        std::env::var(MODEL_ENDPOINT_ENV).ok().filter(|s| !s.trim().is_empty()).map(Self::new)
    }
}

#[derive(Serialize)]
struct WireRequest<'a> {
    sentence: &'a str,
    option1: &'a str,
    option2: &'a str,
}

#[derive(Deserialize)]
struct WireResponse {
    scores: Vec<f64>,
    model: String,
}

/// Counting semaphore bounding concurrent requests.
#[derive(Debug)]
struct Gate {
    free: Mutex<usize>,
    cv: Condvar,
}

struct Permit<'a>(&'a Gate);

impl Gate {
    fn acquire(&self) -> Permit<'_> {
        let mut free = self.free.lock().unwrap_or_else(|p| p.into_inner());
        while *free == 0 {
            free = self.cv.wait(free).unwrap_or_else(|p| p.into_inner());
        }
        *free -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap_or_else(|p| p.into_inner()) += 1;
        self.0.cv.notify_one();
    }
}

/// Client for an out-of-process scoring model. Blocking; do not call from
/// inside an async runtime thread.
#[derive(Debug)]
pub struct RemotePredictor {
    name: String,
    url: String,
    config: RemoteConfig,
    client: reqwest::blocking::Client,
    gate: Gate,
}

impl RemotePredictor {
    pub fn new(name: impl Into<String>, config: RemoteConfig) -> Result<Self, PredictError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| PredictError::RemoteUnavailable { retries: 0, reason: e.to_string() })?;
        let url = format!("{}/score", config.endpoint.trim_end_matches('/'));
        let gate = Gate { free: Mutex::new(config.max_in_flight.max(1)), cv: Condvar::new() };
        Ok(Self { name: name.into(), url, config, client, gate })
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    fn attempt(&self, req: &PredictionRequest) -> Result<WireResponse, Attempt> {
        let _permit = self.gate.acquire();
        let body = WireRequest { sentence: &req.sentence, option1: &req.option1, option2: &req.option2 };
        let resp = self.client.post(&self.url).json(&body).send().map_err(|e| Attempt::Retry(e.to_string()))?;
        let status = resp.status();
        if status.is_server_error() {
            return Err(Attempt::Retry(format!("status {status}")));
        }
        if !status.is_success() {
            return Err(Attempt::Fatal(PredictError::MalformedResponse(format!("status {status}"))));
        }
        resp.json::<WireResponse>().map_err(|e| Attempt::Fatal(PredictError::MalformedResponse(e.to_string())))
    }
}

enum Attempt {
    Retry(String),
    Fatal(PredictError),
}

impl Predictor for RemotePredictor {
    fn name(&self) -> &str {
        &self.name
    }

    fn predict(&self, req: &PredictionRequest) -> Result<Prediction, PredictError> {
        req.validate()?;
        let started = Instant::now();
        let mut last = String::new();
        for attempt in 0..=self.config.retries {
            if attempt > 0 {
                std::thread::sleep(self.config.backoff * attempt);
            }
            match self.attempt(req) {
                Ok(wire) => {
                    let scores: [f64; 2] = wire.scores.as_slice().try_into().map_err(|_| {
                        PredictError::MalformedResponse(format!("expected 2 scores, got {}", wire.scores.len()))
                    })?;
                    if scores.iter().any(|s| !s.is_finite()) {
                        return Err(PredictError::MalformedResponse("non-finite score".into()));
                    }
                    let model = if wire.model.trim().is_empty() { self.name.clone() } else { wire.model };
                    let latency = started.elapsed().as_millis() as u64;
                    return Ok(Prediction::from_scores(scores, model, latency));
                }
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retry(reason)) => last = reason,
            }
        }
        Err(PredictError::RemoteUnavailable { retries: self.config.retries, reason: last })
    }
}
