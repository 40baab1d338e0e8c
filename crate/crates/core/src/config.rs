//! Artist-editable mapping and prompt rules.
//!
//! Both structs deserialize from the engine's JSON configuration and are
//! checked with `validate` before use.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lang::Pos;
use crate::mapper::Shape;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid configuration: {0}")]
pub struct ConfigError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HueMode {
    /// FNV-1a hash of the word, mod 360.
    TokenHash,
    /// Hue derived from the palette seed, the word's tag and its sentence.
    FeaturePalette,
}

/// Camera placement. `None` fields fall back to the scene-derived default.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraConfig {
    pub eye: Option<[f64; 3]>,
    pub look_at: Option<[f64; 3]>,
    pub vertical_fov_deg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MappingConfig {
    pub scene_width: f64,
    pub scene_height: f64,
    pub scene_depth: f64,
    pub layer_height: f64,
    pub shape_by_pos: BTreeMap<Pos, Shape>,
    pub hue_mode: HueMode,
    pub style_base_prompt: String,
    pub panel_width_px: u32,
    pub panel_height_px: u32,
    pub camera: CameraConfig,
}

impl Default for MappingConfig {
    fn default() -> Self {
        MappingConfig {
            scene_width: 4.0,
            scene_height: 6.0,
            scene_depth: 8.0,
            layer_height: 1.0,
            shape_by_pos: BTreeMap::from([
                (Pos::Noun, Shape::Slab),
                (Pos::Verb, Shape::Ribbon),
                (Pos::Adj, Shape::Sphere),
                (Pos::Adv, Shape::Column),
            ]),
            hue_mode: HueMode::TokenHash,
            style_base_prompt: "ink wash scroll painting, muted palette".into(),
            panel_width_px: 512,
            panel_height_px: 768,
            camera: CameraConfig::default(),
        }
    }
}

impl MappingConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let dims = [
            ("scene_width", self.scene_width),
            ("scene_height", self.scene_height),
            ("scene_depth", self.scene_depth),
            ("layer_height", self.layer_height),
        ];
        for (name, v) in dims {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError(format!("mapping.{name} must be a positive number")));
            }
        }
        for pos in [Pos::Noun, Pos::Verb, Pos::Adj, Pos::Adv] {
            if !self.shape_by_pos.contains_key(&pos) {
                return Err(ConfigError(format!("mapping.shape_by_pos is missing {}", pos.as_str())));
            }
        }
        for (name, v) in [("panel_width_px", self.panel_width_px), ("panel_height_px", self.panel_height_px)] {
            if v == 0 || v % 8 != 0 {
                return Err(ConfigError(format!("mapping.{name} must be a positive multiple of 8")));
            }
        }
        if let Some(fov) = self.camera.vertical_fov_deg {
            if !(fov > 0.0 && fov < 180.0) {
                return Err(ConfigError("mapping.camera.vertical_fov_deg must be in (0, 180)".into()));
            }
        }
        let (eye, look_at) = (self.camera_eye(), self.camera_look_at());
        if eye == look_at {
            return Err(ConfigError("mapping.camera eye and look_at coincide".into()));
        }
        if eye.iter().chain(look_at.iter()).any(|c| !c.is_finite()) {
            return Err(ConfigError("mapping.camera coordinates must be finite".into()));
        }
        Ok(())
    }

    pub fn scene_center(&self) -> [f64; 3] {
        [self.scene_width / 2.0, self.scene_height / 2.0, self.scene_depth / 2.0]
    }

    /// Default eye sits in front of the scene, horizontally centred,
    /// slightly above mid-height.
    pub fn camera_eye(&self) -> [f64; 3] {
        self.camera.eye.unwrap_or([
            self.scene_width / 2.0,
            self.scene_height * 0.6,
            -self.scene_depth * 1.2,
        ])
    }

    pub fn camera_look_at(&self) -> [f64; 3] {
        self.camera.look_at.unwrap_or_else(|| self.scene_center())
    }

    pub fn camera_fov_deg(&self) -> f64 {
        self.camera.vertical_fov_deg.unwrap_or(45.0)
    }
}

/// Constants of the prompt template.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PromptConfig {
    pub negative: String,
    pub max_words: usize,
    pub sparse_below: usize,
    pub sparse_modifier: String,
    pub dense_above: usize,
    pub dense_modifier: String,
    pub diversity_above: f64,
    pub diversity_modifier: String,
    pub strength_base: f64,
    pub strength_gain: f64,
    pub steps: u32,
}

impl Default for PromptConfig {
    fn default() -> Self {
        PromptConfig {
            negative: "photograph, text, watermark, signature, frame".into(),
            max_words: 5,
            sparse_below: 8,
            sparse_modifier: "sparse composition".into(),
            dense_above: 25,
            dense_modifier: "dense intricate composition".into(),
            diversity_above: 0.7,
            diversity_modifier: "varied textures".into(),
            strength_base: 0.35,
            strength_gain: 0.3,
            steps: 30,
        }
    }
}

impl PromptConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.steps == 0 {
            return Err(ConfigError("prompt.steps must be at least 1".into()));
        }
        if !self.strength_base.is_finite() || !self.strength_gain.is_finite() {
            return Err(ConfigError("prompt strength constants must be finite".into()));
        }
        if !self.diversity_above.is_finite() {
            return Err(ConfigError("prompt.diversity_above must be finite".into()));
        }
        Ok(())
    }
}
