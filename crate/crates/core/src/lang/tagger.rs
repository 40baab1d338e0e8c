//! Rule cascade POS tagger.
//!
//! Order: closed-class lexicons (determiner, preposition, conjunction,
//! pronoun, interjection), verb lexicon, suffix rules, default Noun. Suffix
//! rules need at least two characters of stem so short words like "red" or
//! "bed" are not caught by them.

use super::lexicon::Lexicons;
use super::token::{Pos, Token, TokenKind};

const SUFFIX_RULES: &[(&str, Pos)] = &[
    ("ly", Pos::Adv),
    ("ing", Pos::Verb),
    ("ed", Pos::Verb),
    ("tion", Pos::Noun),
    ("ness", Pos::Noun),
    ("ment", Pos::Noun),
    ("ity", Pos::Noun),
    ("ous", Pos::Adj),
    ("ful", Pos::Adj),
    ("ive", Pos::Adj),
    ("al", Pos::Adj),
];

const MIN_STEM_CHARS: usize = 2;

fn is_verb_form(word: &str, lex: &Lexicons) -> bool {
    lex.verbs.contains(word)
        || word.strip_suffix('s').is_some_and(|base| lex.verbs.contains(base))
        || word.strip_suffix("es").is_some_and(|base| lex.verbs.contains(base))
}

fn suffix_tag(word: &str) -> Option<Pos> {
    SUFFIX_RULES.iter().find_map(|(suffix, pos)| {
        let stem = word.strip_suffix(suffix)?;
        (stem.chars().count() >= MIN_STEM_CHARS).then_some(*pos)
    })
}

pub(crate) fn tag_word(word: &str, lex: &Lexicons) -> Pos {
    let closed = [
        (&lex.determiners, Pos::Determiner),
        (&lex.prepositions, Pos::Preposition),
        (&lex.conjunctions, Pos::Conjunction),
        (&lex.pronouns, Pos::Pronoun),
        (&lex.interjections, Pos::Interjection),
    ];
    if let Some((_, pos)) = closed.iter().find(|(list, _)| list.contains(word)) {
        return *pos;
    }
    if is_verb_form(word, lex) {
        return Pos::Verb;
    }
    suffix_tag(word).unwrap_or(Pos::Noun)
}

/// Fill `pos` on every token. Numbers and punctuation get `Other`.
pub fn tag_pos(tokens: &mut [Token], lex: &Lexicons) {
    for token in tokens {
        token.pos = match token.kind {
            TokenKind::Word => tag_word(&token.lower, lex),
            TokenKind::Number | TokenKind::Punct => Pos::Other,
        };
    }
}
