//! Engine 2: stylize a base image through a pluggable backend.
//!
//! Two backends ship: [`RemoteBackend`] speaks the JSON img2img contract in
//! [`wire`] over HTTP, and [`FallbackBackend`] runs the deterministic
//! offline filter in [`fallback`]. [`Synthesizer`] wraps either one with
//! request validation, a global in-flight limit and an overall deadline.

pub mod fallback;
mod remote;
pub mod wire;

pub use fallback::{fallback_stylize, FallbackBackend};
pub use remote::RemoteBackend;

use std::sync::Arc;
use std::time::Duration;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tokio::sync::Semaphore;

use crate::image::{png_dimensions, RgbaImage};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynthesisError {
    #[error("backend unreachable after {attempts} attempt(s): {message}")]
    BackendUnreachable { attempts: u32, message: String },
    #[error("backend rejected request with status {status}: {body}")]
    BackendRejected { status: u16, body: String },
    #[error("cannot decode backend image: {0}")]
    DecodeError(String),
    #[error("invalid synthesis request: {0}")]
    InvalidRequest(String),
}

impl SynthesisError {
    /// Stable name used in event payloads.
    pub fn kind(&self) -> &'static str {
        match self {
            SynthesisError::BackendUnreachable { .. } => "BackendUnreachable",
            SynthesisError::BackendRejected { .. } => "BackendRejected",
            SynthesisError::DecodeError(_) => "DecodeError",
            SynthesisError::InvalidRequest(_) => "InvalidRequest",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisRequest {
    /// PNG bytes.
    pub base_image: Vec<u8>,
    pub prompt: String,
    pub negative_prompt: String,
    pub strength: f64,
    pub steps: u32,
    pub seed: u64,
    pub width: u32,
    pub height: u32,
}

impl SynthesisRequest {
    pub fn validate(&self) -> Result<(), SynthesisError> {
        let invalid = |m: String| Err(SynthesisError::InvalidRequest(m));
        if self.width == 0 || self.height == 0 || !self.width.is_multiple_of(8) || !self.height.is_multiple_of(8) {
            return invalid(format!("{}x{} is not a positive multiple of 8", self.width, self.height));
        }
        if !(0.0..=1.0).contains(&self.strength) {
            return invalid(format!("strength {} outside [0, 1]", self.strength));
        }
        match png_dimensions(&self.base_image) {
            Ok(dims) if dims == (self.width, self.height) => Ok(()),
            Ok((w, h)) => invalid(format!(
                "base image is {w}x{h}, request says {}x{}",
                self.width, self.height
            )),
            Err(e) => invalid(format!("base image: {e}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesisResult {
    /// PNG bytes.
    pub image: Vec<u8>,
    pub seed_used: u64,
    pub duration_ms: u64,
    pub backend_id: String,
}

#[async_trait]
pub trait SynthesisBackend: Send + Sync {
    fn id(&self) -> &str;

    async fn synthesize(&self, request: &SynthesisRequest) -> Result<SynthesisResult, SynthesisError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Remote,
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackendConfig {
    pub kind: BackendKind,
    pub base_url: String,
    pub timeout_ms: u64,
    pub max_in_flight: usize,
    /// Delay before each retry of an unreachable backend.
    pub retry_delays_ms: Vec<u64>,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            kind: BackendKind::Fallback,
            base_url: "http://127.0.0.1:7860".into(),
            timeout_ms: 60_000,
            max_in_flight: 2,
            retry_delays_ms: vec![500, 2_000],
        }
    }
}

impl BackendConfig {
    pub fn validate(&self) -> Result<(), crate::config::ConfigError> {
        use crate::config::ConfigError;
        if self.timeout_ms == 0 {
            return Err(ConfigError("backend.timeout_ms must be positive".into()));
        }
        if self.max_in_flight == 0 {
            return Err(ConfigError("backend.max_in_flight must be at least 1".into()));
        }
        if self.kind == BackendKind::Remote
            && !(self.base_url.starts_with("http://") || self.base_url.starts_with("https://"))
        {
            return Err(ConfigError("backend.base_url must be an http(s) URL".into()));
        }
        Ok(())
    }

    pub fn build(&self) -> Result<Arc<dyn SynthesisBackend>, SynthesisError> {
        Ok(match self.kind {
            BackendKind::Fallback => Arc::new(FallbackBackend::new()),
            BackendKind::Remote => Arc::new(RemoteBackend::new(
                &self.base_url,
                Duration::from_millis(self.timeout_ms),
                self.retry_delays_ms.iter().map(|ms| Duration::from_millis(*ms)).collect(),
            )?),
        })
    }

    /// Longest a single `synthesize` call may take, retries included.
    pub fn call_budget(&self) -> Duration {
        let attempts = self.retry_delays_ms.len() as u64 + 1;
        Duration::from_millis(self.timeout_ms * attempts + self.retry_delays_ms.iter().sum::<u64>())
    }
}

/// Validating, load-limited front for a backend. Cheap to clone.
#[derive(Clone)]
pub struct Synthesizer {
    backend: Arc<dyn SynthesisBackend>,
    permits: Arc<Semaphore>,
    budget: Duration,
}

impl Synthesizer {
    pub fn new(backend: Arc<dyn SynthesisBackend>, max_in_flight: usize, budget: Duration) -> Self {
        Synthesizer {
            backend,
            permits: Arc::new(Semaphore::new(max_in_flight.max(1))),
            budget,
        }
    }

    pub fn from_config(config: &BackendConfig) -> Result<Self, SynthesisError> {
        Ok(Self::new(config.build()?, config.max_in_flight, config.call_budget()))
    }

    pub fn backend_id(&self) -> &str {
        self.backend.id()
    }

    pub async fn synthesize(&self, request: &SynthesisRequest) -> Result<SynthesisResult, SynthesisError> {
        request.validate()?;
        let _permit = self
            .permits
            .acquire()
            .await
            .map_err(|_| SynthesisError::BackendUnreachable {
                attempts: 0,
                message: "synthesizer shut down".into(),
            })?;
        let result = tokio::time::timeout(self.budget, self.backend.synthesize(request))
            .await
            .map_err(|_| SynthesisError::BackendUnreachable {
                attempts: 1,
                message: format!("no result within {:?}", self.budget),
            })??;
        let decoded = RgbaImage::from_png(&result.image).map_err(|e| SynthesisError::DecodeError(e.to_string()))?;
        if (decoded.width(), decoded.height()) != (request.width, request.height) {
            return Err(SynthesisError::DecodeError(format!(
                "result is {}x{}, expected {}x{}",
                decoded.width(),
                decoded.height(),
                request.width,
                request.height
            )));
        }
        Ok(result)
    }
}
