//! Engine for the Equivalence installation.
//!
//! Utterances flow through a fixed chain of stages:
//!
//! 1. [`lang`] turns text into tokens, tags, clause depths and a feature vector.
//! 2. [`mapper`] lays the content words out as 3D primitives and rasterizes
//!    them to a base image.
//! 3. [`prompt`] derives the text prompt for the stylizer.
//! 4. [`synthesis`] stylizes the base image through a pluggable backend.
//! 5. [`scroll`] appends finished panels to a horizontal scroll and renders
//!    blended viewports.
//!
//! [`pipeline`] strings the stages together for one utterance.

pub mod config;
pub mod hash;
pub mod image;
pub mod lang;
pub mod mapper;
pub mod pipeline;
pub mod prompt;
pub mod scroll;
pub mod synthesis;

pub use config::{HueMode, MappingConfig, PromptConfig};
pub use image::RgbaImage;
pub use lang::{Analysis, Analyzer, LanguageFeatures, Lexicons, Pos, Token, TokenKind, Utterance};
pub use mapper::{Primitive, Shape, SpatialStructure};
pub use prompt::PromptSpec;
pub use scroll::{Panel, Scroll};
