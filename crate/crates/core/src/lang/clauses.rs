//! Sentence split and clause depth.

use serde::{Deserialize, Serialize};

use super::lexicon::Lexicons;
use super::token::{Token, TokenKind};

/// A sentence as a half-open token range, with its clause depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub start: usize,
    pub end: usize,
    /// 1 + number of subordinator words in the sentence.
    pub depth: usize,
}

impl Sentence {
    pub fn contains(&self, token_index: usize) -> bool {
        (self.start..self.end).contains(&token_index)
    }
}

fn is_terminator(token: &Token) -> bool {
    token.kind == TokenKind::Punct && matches!(token.surface.as_str(), "." | "!" | "?")
}

/// Half-open token ranges of each sentence.
///
/// Splits on `.`, `!` and `?`. A terminator only closes a sentence that
/// already holds a word or number, so runs like `?!` or `...` stay attached
/// to the sentence they end. Unterminated trailing material forms the final
/// sentence; if it is pure punctuation it joins the previous one instead.
/// Non-empty token input always yields at least one range.
pub fn sentence_bounds(tokens: &[Token]) -> Vec<(usize, usize)> {
    let mut bounds: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    let mut has_content = false;
    for (i, token) in tokens.iter().enumerate() {
        has_content |= token.is_countable();
        if !is_terminator(token) {
            continue;
        }
        if has_content {
            bounds.push((start, i + 1));
            start = i + 1;
            has_content = false;
        } else if let Some(last) = bounds.last_mut() {
            last.1 = i + 1;
            start = i + 1;
        }
    }
    if start < tokens.len() {
        match bounds.last_mut() {
            Some(last) if !has_content => last.1 = tokens.len(),
            _ => bounds.push((start, tokens.len())),
        }
    }
    bounds
}

/// Sentence split plus clause depth: 1 + subordinator words per sentence.
pub fn segment_clauses(tokens: &[Token], lex: &Lexicons) -> Vec<Sentence> {
    sentence_bounds(tokens)
        .into_iter()
        .map(|(start, end)| {
            let subordinators = tokens[start..end]
                .iter()
                .filter(|t| t.kind == TokenKind::Word && lex.subordinators.contains(&t.lower))
                .count();
            Sentence {
                start,
                end,
                depth: 1 + subordinators,
            }
        })
        .collect()
}
