use serde::{Deserialize, Serialize};

use super::LangError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Word,
    Number,
    Punct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    Adv,
    Pronoun,
    Determiner,
    Preposition,
    Conjunction,
    Interjection,
    Other,
}

impl Pos {
    pub const ALL: [Pos; 10] = [
        Pos::Noun,
        Pos::Verb,
        Pos::Adj,
        Pos::Adv,
        Pos::Pronoun,
        Pos::Determiner,
        Pos::Preposition,
        Pos::Conjunction,
        Pos::Interjection,
        Pos::Other,
    ];

    /// Noun, verb, adjective and adverb carry the content of an utterance.
    pub fn is_content(self) -> bool {
        matches!(self, Pos::Noun | Pos::Verb | Pos::Adj | Pos::Adv)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Noun => "Noun",
            Pos::Verb => "Verb",
            Pos::Adj => "Adj",
            Pos::Adv => "Adv",
            Pos::Pronoun => "Pronoun",
            Pos::Determiner => "Determiner",
            Pos::Preposition => "Preposition",
            Pos::Conjunction => "Conjunction",
            Pos::Interjection => "Interjection",
            Pos::Other => "Other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub lower: String,
    pub index: usize,
    pub kind: TokenKind,
    pub pos: Pos,
}

impl Token {
    fn new(surface: String, index: usize, kind: TokenKind) -> Self {
        Token {
            lower: surface.to_lowercase(),
            surface,
            index,
            kind,
            pos: Pos::Other,
        }
    }

    /// Word or Number.
    pub fn is_countable(&self) -> bool {
        self.kind != TokenKind::Punct
    }
}

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}')
}

fn joins_run(c: char) -> bool {
    c.is_alphanumeric() || is_apostrophe(c)
}

/// Split text into Word, Number and Punct tokens.
///
/// Whitespace separates tokens and is dropped. A maximal run of letters,
/// digits and apostrophes is one token (Number when every char is numeric).
/// Any other character is a Punct token of its own, as is each apostrophe
/// of a run that holds no letter or digit.
pub fn tokenize(text: &str) -> Result<Vec<Token>, LangError> {
    if text.trim().is_empty() {
        return Err(LangError::EmptyInput);
    }
    let mut tokens = Vec::new();
    let mut run = String::new();
    let flush = |run: &mut String, tokens: &mut Vec<Token>| {
        if run.is_empty() {
            return;
        }
        let word = std::mem::take(run);
        if word.chars().any(char::is_alphanumeric) {
            let kind = if word.chars().all(char::is_numeric) {
                TokenKind::Number
            } else {
                TokenKind::Word
            };
            tokens.push(Token::new(word, tokens.len(), kind));
        } else {
            for c in word.chars() {
                tokens.push(Token::new(c.to_string(), tokens.len(), TokenKind::Punct));
            }
        }
    };
    for c in text.chars() {
        if joins_run(c) {
            run.push(c);
            continue;
        }
        flush(&mut run, &mut tokens);
        if !c.is_whitespace() {
            tokens.push(Token::new(c.to_string(), tokens.len(), TokenKind::Punct));
        }
    }
    flush(&mut run, &mut tokens);
    Ok(tokens)
}
