//! Text prompt for the stylizer, built from the transcript and its features.
//!
//! Template: `style_base_prompt, w1, ..., wN[, density][, diversity]` where
//! the words are the most frequent content words (ties by first
//! occurrence). Every constant comes from [`PromptConfig`].

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::config::{MappingConfig, PromptConfig};
use crate::lang::{LanguageFeatures, Token};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub positive: String,
    pub negative: String,
    pub strength: f64,
    pub steps: u32,
    pub seed: u64,
}

/// The `limit` most frequent content-word lower forms, ties broken by
/// first occurrence.
pub fn top_content_words(tokens: &[Token], limit: usize) -> Vec<String> {
    let mut counts: HashMap<&str, (usize, usize)> = HashMap::new();
    for (order, token) in tokens.iter().filter(|t| t.pos.is_content()).enumerate() {
        counts.entry(token.lower.as_str()).or_insert((0, order)).0 += 1;
    }
    let mut ranked: Vec<(&str, (usize, usize))> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1 .0.cmp(&a.1 .0).then(a.1 .1.cmp(&b.1 .1)));
    ranked.into_iter().take(limit).map(|(w, _)| w.to_string()).collect()
}

pub fn strength_for(features: &LanguageFeatures, prompt: &PromptConfig) -> f64 {
    (prompt.strength_base + prompt.strength_gain * features.content_ratio).clamp(0.0, 1.0)
}

pub fn build_prompt(
    tokens: &[Token],
    features: &LanguageFeatures,
    mapping: &MappingConfig,
    prompt: &PromptConfig,
    seed: u64,
) -> PromptSpec {
    let mut parts = vec![mapping.style_base_prompt.trim().to_string()];
    parts.extend(top_content_words(tokens, prompt.max_words));
    if features.token_count < prompt.sparse_below {
        parts.push(prompt.sparse_modifier.clone());
    } else if features.token_count > prompt.dense_above {
        parts.push(prompt.dense_modifier.clone());
    }
    if features.lexical_diversity > prompt.diversity_above {
        parts.push(prompt.diversity_modifier.clone());
    }
    parts.retain(|p| !p.is_empty());
    // An empty base prompt with no content words still needs some text.
    if parts.is_empty() {
        parts.push("abstract composition".into());
    }
    PromptSpec {
        positive: parts.join(", "),
        negative: prompt.negative.clone(),
        strength: strength_for(features, prompt),
        steps: prompt.steps.max(1),
        seed,
    }
}
