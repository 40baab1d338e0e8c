use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::clauses::Sentence;
use super::token::{Pos, Token, TokenKind};

/// One unit of audience speech, already transcribed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub id: String,
    pub session_id: String,
    pub text: String,
    /// Milliseconds since the Unix epoch.
    pub received_at: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageFeatures {
    /// Word and Number tokens.
    pub token_count: usize,
    pub sentence_count: usize,
    pub clause_depths: Vec<usize>,
    /// Word tokens per tag; tags with no words are absent.
    pub pos_histogram: BTreeMap<Pos, usize>,
    pub content_ratio: f64,
    pub mean_word_length: f64,
    pub lexical_diversity: f64,
}

impl LanguageFeatures {
    pub fn from_parts(tokens: &[Token], sentences: &[Sentence]) -> Self {
        let words: Vec<&Token> = tokens.iter().filter(|t| t.kind == TokenKind::Word).collect();
        let mut pos_histogram = BTreeMap::new();
        for w in &words {
            *pos_histogram.entry(w.pos).or_insert(0) += 1;
        }
        let (content_ratio, mean_word_length, lexical_diversity) = if words.is_empty() {
            (0.0, 0.0, 0.0)
        } else {
            let n = words.len() as f64;
            let content = words.iter().filter(|w| w.pos.is_content()).count();
            let chars: usize = words.iter().map(|w| w.surface.chars().count()).sum();
            let distinct: HashSet<&str> = words.iter().map(|w| w.lower.as_str()).collect();
            (content as f64 / n, chars as f64 / n, distinct.len() as f64 / n)
        };
        LanguageFeatures {
            token_count: tokens.iter().filter(|t| t.is_countable()).count(),
            sentence_count: sentences.len(),
            clause_depths: sentences.iter().map(|s| s.depth).collect(),
            pos_histogram,
            content_ratio,
            mean_word_length,
            lexical_diversity,
        }
    }

    pub fn count(&self, pos: Pos) -> usize {
        self.pos_histogram.get(&pos).copied().unwrap_or(0)
    }

    pub fn content_word_count(&self) -> usize {
        Pos::ALL.iter().filter(|p| p.is_content()).map(|p| self.count(*p)).sum()
    }
}
