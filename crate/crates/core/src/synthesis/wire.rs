//! JSON wire format of the remote img2img contract.
//!
//! `POST {base_url}/v1/img2img` with a [`WireRequest`] body; a 200 response
//! carries a [`WireResponse`]. Images travel as standard base64 PNG.

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use serde::{Deserialize, Serialize};

use super::{SynthesisError, SynthesisRequest, SynthesisResult};

pub const IMG2IMG_PATH: &str = "/v1/img2img";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireRequest {
    pub base_image: String,
    pub prompt: String,
    pub negative_prompt: String,
    pub strength: f64,
    pub steps: u32,
    pub seed: u64,
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireResponse {
    pub image: String,
    pub seed_used: u64,
    pub duration_ms: u64,
}

fn decode_b64(field: &str, data: &str) -> Result<Vec<u8>, SynthesisError> {
    STANDARD
        .decode(data)
        .map_err(|e| SynthesisError::DecodeError(format!("{field}: {e}")))
}

pub fn encode_request(r: &SynthesisRequest) -> WireRequest {
    WireRequest {
        base_image: STANDARD.encode(&r.base_image),
        prompt: r.prompt.clone(),
        negative_prompt: r.negative_prompt.clone(),
        strength: r.strength,
        steps: r.steps,
        seed: r.seed,
        width: r.width,
        height: r.height,
    }
}

pub fn decode_request(w: &WireRequest) -> Result<SynthesisRequest, SynthesisError> {
    Ok(SynthesisRequest {
        base_image: decode_b64("base_image", &w.base_image)?,
        prompt: w.prompt.clone(),
        negative_prompt: w.negative_prompt.clone(),
        strength: w.strength,
        steps: w.steps,
        seed: w.seed,
        width: w.width,
        height: w.height,
    })
}

pub fn encode_response(r: &SynthesisResult) -> WireResponse {
    WireResponse {
        image: STANDARD.encode(&r.image),
        seed_used: r.seed_used,
        duration_ms: r.duration_ms,
    }
}

/// The backend id is local knowledge and not part of the wire message.
pub fn decode_response(w: &WireResponse, backend_id: &str) -> Result<SynthesisResult, SynthesisError> {
    Ok(SynthesisResult {
        image: decode_b64("image", &w.image)?,
        seed_used: w.seed_used,
        duration_ms: w.duration_ms,
        backend_id: backend_id.to_string(),
    })
}
