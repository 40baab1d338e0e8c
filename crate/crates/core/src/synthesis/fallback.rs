//! Offline stand-in for the diffusion backend.
//!
//! Three passes, each scaled by `strength`:
//!
//! 1. posterize each colour channel to `8 - round(4 * strength)` bits;
//! 2. add luminance grain from seeded value noise, amplitude `24 * strength`;
//! 3. darken an 8 px border band by `15% * strength`.
//!
//! At strength 0 every pass is the identity. Alpha is left untouched.

use std::time::Instant;

use async_trait::async_trait;

use super::{SynthesisBackend, SynthesisError, SynthesisRequest, SynthesisResult};
use crate::hash::splitmix64;
use crate::image::RgbaImage;

const GRAIN_AMPLITUDE: f64 = 24.0;
const GRAIN_CELL_PX: u32 = 6;
const BORDER_PX: u32 = 8;
const BORDER_DARKEN: f64 = 0.15;

/// Bits kept per channel at a given strength.
pub fn posterize_bits(strength: f64) -> u32 {
    8 - (4.0 * strength.clamp(0.0, 1.0)).round() as u32
}

fn posterize(v: u8, bits: u32) -> u8 {
    if bits >= 8 {
        return v;
    }
    let levels = (1u32 << bits) - 1;
    let q = u32::from(v) >> (8 - bits);
    ((q * 255 + levels / 2) / levels) as u8
}

fn lattice(seed: u64, gx: u32, gy: u32) -> f64 {
    let h = splitmix64(seed ^ splitmix64((u64::from(gx) << 32) | u64::from(gy)));
    // 53 high bits to [0, 1), then to [-1, 1).
    (h >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

/// Bilinearly interpolated lattice noise in [-1, 1].
fn value_noise(seed: u64, x: u32, y: u32) -> f64 {
    let (gx, gy) = (x / GRAIN_CELL_PX, y / GRAIN_CELL_PX);
    let fx = f64::from(x % GRAIN_CELL_PX) / f64::from(GRAIN_CELL_PX);
    let fy = f64::from(y % GRAIN_CELL_PX) / f64::from(GRAIN_CELL_PX);
    let top = lattice(seed, gx, gy) * (1.0 - fx) + lattice(seed, gx + 1, gy) * fx;
    let bottom = lattice(seed, gx, gy + 1) * (1.0 - fx) + lattice(seed, gx + 1, gy + 1) * fx;
    top * (1.0 - fy) + bottom * fy
}

pub fn fallback_stylize(base: &RgbaImage, strength: f64, seed: u64) -> RgbaImage {
    let strength = strength.clamp(0.0, 1.0);
    let bits = posterize_bits(strength);
    let amplitude = GRAIN_AMPLITUDE * strength;
    let border_scale = 1.0 - BORDER_DARKEN * strength;
    let (w, h) = (base.width(), base.height());
    let mut out = base.clone();
    for y in 0..h {
        let row = out.row_mut(y);
        for x in 0..w {
            let grain = amplitude * value_noise(seed, x, y);
            let in_border = x < BORDER_PX || y < BORDER_PX || x + BORDER_PX >= w || y + BORDER_PX >= h;
            let px = &mut row[x as usize * 4..x as usize * 4 + 3];
            for c in px.iter_mut() {
                let mut v = (f64::from(posterize(*c, bits)) + grain).round().clamp(0.0, 255.0);
                if in_border {
                    v = (v * border_scale).round();
                }
                *c = v as u8;
            }
        }
    }
    out
}

/// Backend wrapper around [`fallback_stylize`].
#[derive(Debug, Default, Clone, Copy)]
pub struct FallbackBackend;

impl FallbackBackend {
    pub fn new() -> Self {
        FallbackBackend
    }
}

#[async_trait]
impl SynthesisBackend for FallbackBackend {
    fn id(&self) -> &str {
        "fallback"
    }

    async fn synthesize(&self, request: &SynthesisRequest) -> Result<SynthesisResult, SynthesisError> {
        let started = Instant::now();
        let base = RgbaImage::from_png(&request.base_image).map_err(|e| SynthesisError::DecodeError(e.to_string()))?;
        let (strength, seed) = (request.strength, request.seed);
        let image = tokio::task::spawn_blocking(move || fallback_stylize(&base, strength, seed).to_png())
            .await
            .map_err(|e| SynthesisError::DecodeError(format!("stylize task: {e}")))?
            .map_err(|e| SynthesisError::DecodeError(e.to_string()))?;
        Ok(SynthesisResult {
            image,
            seed_used: seed,
            duration_ms: started.elapsed().as_millis() as u64,
            backend_id: self.id().to_string(),
        })
    }
}
