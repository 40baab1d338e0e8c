//! Rule-based language analysis.
//!
//! Everything here is a pure function of the input text and the loaded
//! lexicons: no models, no shared mutable state.

mod clauses;
mod features;
mod lexicon;
mod tagger;
mod token;

pub use clauses::{segment_clauses, sentence_bounds, Sentence};
pub use features::{LanguageFeatures, Utterance};
pub use lexicon::{LexiconError, LexiconPaths, Lexicons, WordList};
pub use tagger::tag_pos;
pub use token::{tokenize, Pos, Token, TokenKind};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LangError {
    #[error("input text is empty")]
    EmptyInput,
}

/// Runs the whole analysis chain with one set of lexicons.
#[derive(Debug, Clone, Default)]
pub struct Analyzer {
    lexicons: Lexicons,
}

/// Tokens, sentence split and features for one utterance.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub tokens: Vec<Token>,
    pub sentences: Vec<Sentence>,
    pub features: LanguageFeatures,
}

impl Analyzer {
    pub fn new(lexicons: Lexicons) -> Self {
        Analyzer { lexicons }
    }

    pub fn lexicons(&self) -> &Lexicons {
        &self.lexicons
    }

    /// Tokenize and tag.
    pub fn tokens(&self, text: &str) -> Result<Vec<Token>, LangError> {
        let mut tokens = tokenize(text)?;
        tag_pos(&mut tokens, &self.lexicons);
        Ok(tokens)
    }

    pub fn analyze(&self, text: &str) -> Result<Analysis, LangError> {
        let tokens = self.tokens(text)?;
        let sentences = segment_clauses(&tokens, &self.lexicons);
        let features = LanguageFeatures::from_parts(&tokens, &sentences);
        Ok(Analysis {
            tokens,
            sentences,
            features,
        })
    }

    pub fn extract_features(&self, utterance: &Utterance) -> Result<LanguageFeatures, LangError> {
        self.analyze(&utterance.text).map(|a| a.features)
    }
}
