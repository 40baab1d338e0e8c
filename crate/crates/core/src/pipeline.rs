//! One utterance through both engines.
//!
//! The stages are exposed separately so a caller can report progress
//! between them: [`Analyzer::analyze`], then [`compose`], then
//! [`Synthesizer::synthesize`] on [`Composition::request`].

use thiserror::Error;

use crate::config::{MappingConfig, PromptConfig};
use crate::hash::{fnv1a64, splitmix64};
use crate::image::{ImageError, RgbaImage};
use crate::lang::{Analysis, LangError};
use crate::mapper::{map_structure_or_fallback, rasterize, MapError, SpatialStructure};
use crate::prompt::{build_prompt, PromptSpec};
use crate::synthesis::{SynthesisError, SynthesisRequest, SynthesisResult, Synthesizer};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
}

impl PipelineError {
    pub fn kind(&self) -> &'static str {
        match self {
            PipelineError::Lang(LangError::EmptyInput) => "EmptyInput",
            PipelineError::Map(MapError::NoContentWords) => "NoContentWords",
            PipelineError::Map(MapError::DegenerateCamera) => "DegenerateCamera",
            PipelineError::Image(_) => "ImageError",
            PipelineError::Synthesis(e) => e.kind(),
        }
    }
}

/// Engine-1 output plus the prompt for engine 2.
#[derive(Debug, Clone)]
pub struct Composition {
    pub structure: SpatialStructure,
    pub base: RgbaImage,
    pub base_png: Vec<u8>,
    pub prompt: PromptSpec,
}

impl Composition {
    pub fn request(&self) -> SynthesisRequest {
        request_for(&self.base_png, &self.prompt, self.base.width(), self.base.height())
    }
}

pub fn request_for(base_png: &[u8], prompt: &PromptSpec, width: u32, height: u32) -> SynthesisRequest {
    SynthesisRequest {
        base_image: base_png.to_vec(),
        prompt: prompt.positive.clone(),
        negative_prompt: prompt.negative.clone(),
        strength: prompt.strength,
        steps: prompt.steps,
        seed: prompt.seed,
        width,
        height,
    }
}

/// Default seed for the `ordinal`-th utterance of a session, so identical
/// scripts reproduce identical panels.
pub fn utterance_seed(text: &str, ordinal: u64) -> u64 {
    splitmix64(fnv1a64(text.as_bytes()) ^ splitmix64(ordinal))
}

pub fn compose(
    analysis: &Analysis,
    mapping: &MappingConfig,
    prompt: &PromptConfig,
    seed: u64,
) -> Result<Composition, PipelineError> {
    let structure = map_structure_or_fallback(&analysis.features, &analysis.tokens, mapping, seed);
    let base = rasterize(&structure, mapping)?;
    let base_png = base.to_png()?;
    let prompt = build_prompt(&analysis.tokens, &analysis.features, mapping, prompt, seed);
    Ok(Composition {
        structure,
        base,
        base_png,
        prompt,
    })
}

/// Compose and stylize in one go.
pub async fn render(
    analysis: &Analysis,
    mapping: &MappingConfig,
    prompt: &PromptConfig,
    synthesizer: &Synthesizer,
    seed: u64,
) -> Result<(Composition, SynthesisResult), PipelineError> {
    let composition = compose(analysis, mapping, prompt, seed)?;
    let result = synthesizer.synthesize(&composition.request()).await?;
    Ok((composition, result))
}
