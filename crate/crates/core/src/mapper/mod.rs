//! Engine 1: language features to 3D composition to base image.
//!
//! Grammar drives placement (clause depth lifts a word to a higher layer,
//! later sentences sit further back) while each content word contributes one
//! primitive whose shape, size and hue come from the word itself.

mod color;
mod raster;

pub use color::hsv_to_rgb;
pub use raster::{primitive_alpha, primitive_rgb, rasterize, Projector, Silhouette};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{HueMode, MappingConfig};
use crate::hash::{fnv1a32, fnv1a64, splitmix64};
use crate::lang::{sentence_bounds, LanguageFeatures, Pos, Token};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("utterance has no content words")]
    NoContentWords,
    #[error("camera eye and look_at coincide")]
    DegenerateCamera,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Shape {
    Slab,
    Column,
    Sphere,
    Ribbon,
}

impl Shape {
    /// Extent of the shape at a size factor of 1.
    pub fn unit_scale(self) -> [f64; 3] {
        match self {
            Shape::Slab => [1.2, 0.35, 1.0],
            Shape::Column => [0.35, 1.6, 0.35],
            Shape::Sphere => [0.8, 0.8, 0.8],
            Shape::Ribbon => [1.8, 0.25, 0.25],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Primitive {
    pub shape: Shape,
    pub center: [f64; 3],
    pub scale: [f64; 3],
    pub hue_deg: f64,
    pub alpha: f64,
    pub source_token_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Camera {
    pub eye: [f64; 3],
    pub look_at: [f64; 3],
    pub vertical_fov_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialStructure {
    /// Ascending by `source_token_index`.
    pub primitives: Vec<Primitive>,
    pub camera: Camera,
    pub palette_seed: u64,
}

impl Camera {
    pub fn from_config(config: &MappingConfig) -> Self {
        Camera {
            eye: config.camera_eye(),
            look_at: config.camera_look_at(),
            vertical_fov_deg: config.camera_fov_deg(),
        }
    }
}

const MIN_ALPHA: f64 = 0.1;

fn size_factor(word: &str) -> f64 {
    (word.chars().count() as f64 / 10.0).clamp(0.2, 1.5)
}

fn palette_hue(palette_seed: u64, pos: Pos, sentence: usize) -> f64 {
    let pos_step = match pos {
        Pos::Noun => 0,
        Pos::Verb => 1,
        Pos::Adj => 2,
        Pos::Adv => 3,
        _ => 4,
    };
    ((palette_seed % 360) as usize + 47 * pos_step + 23 * sentence) as f64 % 360.0
}

/// Seed for background and palette, mixing the caller's seed with the words.
fn palette_seed(tokens: &[Token], seed: u64) -> u64 {
    let words: Vec<&str> = tokens
        .iter()
        .filter(|t| t.is_countable())
        .map(|t| t.lower.as_str())
        .collect();
    splitmix64(seed ^ fnv1a64(words.join(" ").as_bytes()))
}

/// Place one primitive per content word.
///
/// - x spreads the word's position among the Word/Number tokens across
///   `scene_width`;
/// - y is the clause depth of its sentence times `layer_height`;
/// - z is the sentence index.
pub fn map_structure(
    features: &LanguageFeatures,
    tokens: &[Token],
    config: &MappingConfig,
    seed: u64,
) -> Result<SpatialStructure, MapError> {
    let palette_seed = palette_seed(tokens, seed);
    let span = features.token_count.saturating_sub(1).max(1) as f64;
    let alpha = features.content_ratio.clamp(MIN_ALPHA, 1.0);
    let bounds = sentence_bounds(tokens);

    let mut primitives = Vec::new();
    let mut ordinal = 0usize;
    for (sentence_index, (start, end)) in bounds.iter().enumerate() {
        let depth = features.clause_depths.get(sentence_index).copied().unwrap_or(1);
        for token in &tokens[*start..*end] {
            if !token.is_countable() {
                continue;
            }
            let position = ordinal;
            ordinal += 1;
            if !token.pos.is_content() {
                continue;
            }
            let Some(&shape) = config.shape_by_pos.get(&token.pos) else {
                continue;
            };
            let factor = size_factor(&token.lower);
            let unit = shape.unit_scale();
            let hue_deg = match config.hue_mode {
                HueMode::TokenHash => f64::from(fnv1a32(token.lower.as_bytes()) % 360),
                HueMode::FeaturePalette => palette_hue(palette_seed, token.pos, sentence_index),
            };
            primitives.push(Primitive {
                shape,
                center: [
                    position as f64 / span * config.scene_width,
                    depth as f64 * config.layer_height,
                    sentence_index as f64,
                ],
                scale: unit.map(|u| u * factor),
                hue_deg,
                alpha,
                source_token_index: token.index,
            });
        }
    }
    if primitives.is_empty() {
        return Err(MapError::NoContentWords);
    }
    Ok(SpatialStructure {
        primitives,
        camera: Camera::from_config(config),
        palette_seed,
    })
}

/// Single sphere at the scene centre, used when nothing else would be drawn.
pub fn fallback_structure(tokens: &[Token], config: &MappingConfig, seed: u64) -> SpatialStructure {
    SpatialStructure {
        primitives: vec![Primitive {
            shape: Shape::Sphere,
            center: config.scene_center(),
            scale: [1.0, 1.0, 1.0],
            hue_deg: 0.0,
            alpha: 0.5,
            source_token_index: 0,
        }],
        camera: Camera::from_config(config),
        palette_seed: palette_seed(tokens, seed),
    }
}

/// `map_structure`, substituting the fallback sphere for `NoContentWords`.
pub fn map_structure_or_fallback(
    features: &LanguageFeatures,
    tokens: &[Token],
    config: &MappingConfig,
    seed: u64,
) -> SpatialStructure {
    map_structure(features, tokens, config, seed)
        .unwrap_or_else(|_| fallback_structure(tokens, config, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::Analyzer;

    fn map(text: &str) -> Result<SpatialStructure, MapError> {
        let a = Analyzer::default().analyze(text).unwrap();
        map_structure(&a.features, &a.tokens, &MappingConfig::default(), 7)
    }

    #[test]
    fn rain_falls() {
        let cfg = MappingConfig::default();
        let s = map("Rain falls.").unwrap();
        assert_eq!(s.primitives.len(), 2);
        let (rain, falls) = (&s.primitives[0], &s.primitives[1]);
        assert_eq!(rain.shape, Shape::Slab);
        assert_eq!(falls.shape, Shape::Ribbon);
        assert_eq!(rain.center, [0.0, cfg.layer_height, 0.0]);
        assert_eq!(falls.center, [cfg.scene_width, cfg.layer_height, 0.0]);
        // "rain": 4 chars -> 0.4; "falls": 5 chars -> 0.5
        assert_eq!(rain.scale, Shape::Slab.unit_scale().map(|u| u * 0.4));
        assert_eq!(falls.scale, Shape::Ribbon.unit_scale().map(|u| u * 0.5));
        assert_eq!(rain.hue_deg, f64::from(equivalence_oracle::ref_fnv1a32(b"rain") % 360));
        assert_eq!(rain.alpha, 1.0);
        assert_eq!((rain.source_token_index, falls.source_token_index), (0, 1));
    }

    #[test]
    fn no_content_words() {
        assert_eq!(map("of the and"), Err(MapError::NoContentWords));
        let a = Analyzer::default().analyze("of the and").unwrap();
        let cfg = MappingConfig::default();
        let s = map_structure_or_fallback(&a.features, &a.tokens, &cfg, 1);
        assert_eq!(s.primitives.len(), 1);
        let p = &s.primitives[0];
        assert_eq!(p.shape, Shape::Sphere);
        assert_eq!(p.center, cfg.scene_center());
        assert_eq!((p.scale, p.hue_deg, p.alpha), ([1.0; 3], 0.0, 0.5));
    }

    #[test]
    fn deterministic() {
        let text = "When the lanterns dimmed, we walked slowly home.";
        assert_eq!(map(text).unwrap(), map(text).unwrap());
    }

    #[test]
    fn layers_and_sentences() {
        let s = map("I left because it rained. Snow stays.").unwrap();
        // left, rained in sentence 0 (depth 2); snow, stays in sentence 1.
        let ys: Vec<f64> = s.primitives.iter().map(|p| p.center[1]).collect();
        let zs: Vec<f64> = s.primitives.iter().map(|p| p.center[2]).collect();
        assert_eq!(ys, vec![2.0, 2.0, 1.0, 1.0]);
        assert_eq!(zs, vec![0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn alpha_has_floor() {
        let s = map("of the and of the and of the and of the rain").unwrap();
        assert_eq!(s.primitives[0].alpha, 0.1);
    }

    #[test]
    fn feature_palette_depends_on_seed() {
        let a = Analyzer::default().analyze("Rain falls.").unwrap();
        let cfg = MappingConfig {
            hue_mode: HueMode::FeaturePalette,
            ..Default::default()
        };
        let s1 = map_structure(&a.features, &a.tokens, &cfg, 1).unwrap();
        let s2 = map_structure(&a.features, &a.tokens, &cfg, 2).unwrap();
        assert_ne!(s1.palette_seed, s2.palette_seed);
        for p in s1.primitives.iter().chain(&s2.primitives) {
            assert!((0.0..360.0).contains(&p.hue_deg));
        }
    }

    #[test]
    fn size_factor_is_clamped() {
        assert_eq!(size_factor("a"), 0.2);
        assert_eq!(size_factor("incomprehensibilities"), 1.5);
        assert_eq!(size_factor("river"), 0.5);
    }
}
