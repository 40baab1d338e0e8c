//! Word lists for the tagger and clause segmenter.
//!
//! Files hold one word per line in UTF-8. Anything after `#` is a comment;
//! blank lines are skipped. Entries are lowercased on load.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read lexicon {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordList(HashSet<String>);

impl WordList {
    pub fn parse(text: &str) -> Self {
        WordList(
            text.lines()
                .map(|line| line.split('#').next().unwrap_or("").trim())
                .filter(|w| !w.is_empty())
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        std::fs::read_to_string(path)
            .map(|s| Self::parse(&s))
            .map_err(|source| LexiconError::Read {
                path: path.to_path_buf(),
                source,
            })
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Optional file overrides. A missing entry keeps the built-in list.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LexiconPaths {
    pub determiners: Option<PathBuf>,
    pub prepositions: Option<PathBuf>,
    pub conjunctions: Option<PathBuf>,
    pub pronouns: Option<PathBuf>,
    pub interjections: Option<PathBuf>,
    pub verbs: Option<PathBuf>,
    pub subordinators: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicons {
    pub determiners: WordList,
    pub prepositions: WordList,
    pub conjunctions: WordList,
    pub pronouns: WordList,
    pub interjections: WordList,
    /// Open-class verb base forms; see `tag_pos` for inflection matching.
    pub verbs: WordList,
    pub subordinators: WordList,
}

impl Default for Lexicons {
    fn default() -> Self {
        Self::builtin()
    }
}

impl Lexicons {
    /// The lists shipped in `data/lexicons`.
    pub fn builtin() -> Self {
        Lexicons {
            determiners: WordList::parse(include_str!("../../data/lexicons/determiners.txt")),
            prepositions: WordList::parse(include_str!("../../data/lexicons/prepositions.txt")),
            conjunctions: WordList::parse(include_str!("../../data/lexicons/conjunctions.txt")),
            pronouns: WordList::parse(include_str!("../../data/lexicons/pronouns.txt")),
            interjections: WordList::parse(include_str!("../../data/lexicons/interjections.txt")),
            verbs: WordList::parse(include_str!("../../data/lexicons/verbs.txt")),
            subordinators: WordList::parse(include_str!("../../data/lexicons/subordinators.txt")),
        }
    }

    pub fn load(paths: &LexiconPaths) -> Result<Self, LexiconError> {
        let mut lex = Self::builtin();
        let slots: [(&Option<PathBuf>, &mut WordList); 7] = [
            (&paths.determiners, &mut lex.determiners),
            (&paths.prepositions, &mut lex.prepositions),
            (&paths.conjunctions, &mut lex.conjunctions),
            (&paths.pronouns, &mut lex.pronouns),
            (&paths.interjections, &mut lex.interjections),
            (&paths.verbs, &mut lex.verbs),
            (&paths.subordinators, &mut lex.subordinators),
        ];
        for (path, list) in slots {
            if let Some(path) = path {
                *list = WordList::load(path)?;
            }
        }
        Ok(lex)
    }
}
