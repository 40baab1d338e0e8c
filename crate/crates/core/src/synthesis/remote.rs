use std::time::{Duration, Instant};

use async_trait::async_trait;
use tracing::warn;

use super::wire::{decode_response, encode_request, WireResponse, IMG2IMG_PATH};
use super::{SynthesisBackend, SynthesisError, SynthesisRequest, SynthesisResult};

/// HTTP client for the img2img wire contract.
///
/// Network failures and timeouts are retried after each delay in
/// `retry_delays`; a non-200 answer is final.
pub struct RemoteBackend {
    client: reqwest::Client,
    endpoint: String,
    retry_delays: Vec<Duration>,
}

enum Attempt {
    Retryable(String),
    Final(SynthesisError),
}

impl RemoteBackend {
    pub fn new(base_url: &str, timeout: Duration, retry_delays: Vec<Duration>) -> Result<Self, SynthesisError> {
        let client = reqwest::Client::builder()
            .timeout(timeout)
            .connect_timeout(timeout)
            .build()
            .map_err(|e| SynthesisError::InvalidRequest(format!("http client: {e}")))?;
        Ok(RemoteBackend {
            client,
            endpoint: format!("{}{IMG2IMG_PATH}", base_url.trim_end_matches('/')),
            retry_delays,
        })
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    async fn attempt(&self, body: &super::wire::WireRequest) -> Result<SynthesisResult, Attempt> {
        let started = Instant::now();
        let resp = self
            .client
            .post(&self.endpoint)
            .json(body)
            .send()
            .await
            .map_err(|e| Attempt::Retryable(e.to_string()))?;
        let status = resp.status();
        let bytes = resp.bytes().await.map_err(|e| Attempt::Retryable(e.to_string()))?;
        if status != reqwest::StatusCode::OK {
            return Err(Attempt::Final(SynthesisError::BackendRejected {
                status: status.as_u16(),
                body: String::from_utf8_lossy(&bytes).into_owned(),
            }));
        }
        let wire: WireResponse = serde_json::from_slice(&bytes)
            .map_err(|e| Attempt::Final(SynthesisError::DecodeError(format!("response body: {e}"))))?;
        let mut result = decode_response(&wire, self.id()).map_err(Attempt::Final)?;
        if result.duration_ms == 0 {
            result.duration_ms = started.elapsed().as_millis() as u64;
        }
        Ok(result)
    }
}

#[async_trait]
impl SynthesisBackend for RemoteBackend {
    fn id(&self) -> &str {
        "remote"
    }

    async fn synthesize(&self, request: &SynthesisRequest) -> Result<SynthesisResult, SynthesisError> {
        let body = encode_request(request);
        let mut attempts = 0u32;
        let mut delays = self.retry_delays.iter();
        loop {
            attempts += 1;
            match self.attempt(&body).await {
                Ok(result) => return Ok(result),
                Err(Attempt::Final(e)) => return Err(e),
                Err(Attempt::Retryable(message)) => match delays.next() {
                    Some(delay) => {
                        warn!(endpoint = %self.endpoint, attempts, %message, "img2img attempt failed, retrying");
                        tokio::time::sleep(*delay).await;
                    }
                    None => return Err(SynthesisError::BackendUnreachable { attempts, message }),
                },
            }
        }
    }
}
