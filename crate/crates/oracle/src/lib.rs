//! Brute-force reference implementations used as test oracles.
//!
//! Nothing in here shares code with `equivalence-core`. The rules are
//! re-derived from the written tokenization, tagging and segmentation
//! rules with the simplest possible code: character-by-character scans,
//! linear lexicon lookups and explicit loops. Only the shipped lexicon data
//! files are shared, because they are data and not implementation.

pub mod fixtures;

const DETERMINERS: &str = include_str!("../../core/data/lexicons/determiners.txt");
const PREPOSITIONS: &str = include_str!("../../core/data/lexicons/prepositions.txt");
const CONJUNCTIONS: &str = include_str!("../../core/data/lexicons/conjunctions.txt");
const PRONOUNS: &str = include_str!("../../core/data/lexicons/pronouns.txt");
const INTERJECTIONS: &str = include_str!("../../core/data/lexicons/interjections.txt");
const VERBS: &str = include_str!("../../core/data/lexicons/verbs.txt");
const SUBORDINATORS: &str = include_str!("../../core/data/lexicons/subordinators.txt");

/// Token class as plain strings so the oracle has no shared types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefToken {
    pub surface: String,
    pub lower: String,
    /// "Word", "Number" or "Punct".
    pub kind: &'static str,
    /// "Noun", "Verb", ... or "Other".
    pub pos: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefFeatures {
    pub token_count: usize,
    pub sentence_count: usize,
    pub clause_depths: Vec<usize>,
    /// Sorted by tag name, zero counts omitted.
    pub pos_histogram: Vec<(&'static str, usize)>,
    pub content_ratio: f64,
    pub mean_word_length: f64,
    pub lexical_diversity: f64,
}

fn words_of(list: &str) -> Vec<String> {
    let mut out = Vec::new();
    for line in list.lines() {
        let mut s = line;
        if let Some(p) = s.find('#') {
            s = &s[..p];
        }
        let s = s.trim();
        if !s.is_empty() {
            out.push(s.to_lowercase());
        }
    }
    out
}

fn contains(list: &str, word: &str) -> bool {
    words_of(list).iter().any(|w| w == word)
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

fn is_run_char(c: char) -> bool {
    c.is_alphanumeric() || is_apostrophe(c)
}

/// Reference tokenizer: one pass over chars, flushing runs by hand.
pub fn ref_tokenize(text: &str) -> Vec<RefToken> {
    let mut out: Vec<RefToken> = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if is_run_char(c) {
            let mut j = i;
            while j < chars.len() && is_run_char(chars[j]) {
                j += 1;
            }
            let run: String = chars[i..j].iter().collect();
            let mut has_alnum = false;
            let mut all_digits = true;
            for ch in run.chars() {
                if ch.is_alphanumeric() {
                    has_alnum = true;
                }
                if !ch.is_numeric() {
                    all_digits = false;
                }
            }
            if has_alnum {
                let kind = if all_digits { "Number" } else { "Word" };
                out.push(RefToken {
                    lower: run.to_lowercase(),
                    surface: run,
                    kind,
                    pos: "Other",
                });
            } else {
                for ch in run.chars() {
                    out.push(punct(ch));
                }
            }
            i = j;
        } else {
            out.push(punct(c));
            i += 1;
        }
    }
    out
}

fn punct(c: char) -> RefToken {
    RefToken {
        surface: c.to_string(),
        lower: c.to_lowercase().collect(),
        kind: "Punct",
        pos: "Other",
    }
}

fn stem_ok(word: &str, suffix: &str) -> bool {
    word.ends_with(suffix) && word.chars().count() >= suffix.chars().count() + 2
}

/// Reference POS cascade for a single lowercased word.
pub fn ref_tag_word(lower: &str) -> &'static str {
    if contains(DETERMINERS, lower) {
        return "Determiner";
    }
    if contains(PREPOSITIONS, lower) {
        return "Preposition";
    }
    if contains(CONJUNCTIONS, lower) {
        return "Conjunction";
    }
    if contains(PRONOUNS, lower) {
        return "Pronoun";
    }
    if contains(INTERJECTIONS, lower) {
        return "Interjection";
    }
    for verb in words_of(VERBS) {
        if lower == verb || lower == format!("{verb}s") || lower == format!("{verb}es") {
            return "Verb";
        }
    }
    if stem_ok(lower, "ly") {
        return "Adv";
    }
    for s in ["ing", "ed"] {
        if stem_ok(lower, s) {
            return "Verb";
        }
    }
    for s in ["tion", "ness", "ment", "ity"] {
        if stem_ok(lower, s) {
            return "Noun";
        }
    }
    for s in ["ous", "ful", "ive", "al"] {
        if stem_ok(lower, s) {
            return "Adj";
        }
    }
    "Noun"
}

pub fn ref_tag(tokens: &mut [RefToken]) {
    for t in tokens.iter_mut() {
        t.pos = if t.kind == "Word" { ref_tag_word(&t.lower) } else { "Other" };
    }
}

/// Reference sentence split; returns token index ranges per sentence.
///
/// A terminator closes the running sentence only if that sentence holds a
/// word or number; otherwise the pending punctuation joins the previous
/// sentence (or keeps accumulating when there is none).
pub fn ref_sentences(tokens: &[RefToken]) -> Vec<Vec<usize>> {
    let mut sentences: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        current.push(i);
        let term = t.kind == "Punct" && (t.surface == "." || t.surface == "!" || t.surface == "?");
        if term {
            let has_content = current.iter().any(|&k| tokens[k].kind != "Punct");
            if has_content {
                sentences.push(std::mem::take(&mut current));
            } else if !sentences.is_empty() {
                let last = sentences.len() - 1;
                sentences[last].append(&mut current);
            }
        }
    }
    if !current.is_empty() {
        let has_content = current.iter().any(|&k| tokens[k].kind != "Punct");
        if has_content || sentences.is_empty() {
            sentences.push(current);
        } else {
            let last = sentences.len() - 1;
            sentences[last].extend(current);
        }
    }
    sentences
}

pub fn ref_depth(tokens: &[RefToken], sentence: &[usize]) -> usize {
    let mut depth = 1;
    for &k in sentence {
        if tokens[k].kind == "Word" && contains(SUBORDINATORS, &tokens[k].lower) {
            depth += 1;
        }
    }
    depth
}

/// Reference feature extraction, one field at a time.
pub fn ref_features(text: &str) -> Option<RefFeatures> {
    if text.trim().is_empty() {
        return None;
    }
    let mut tokens = ref_tokenize(text);
    ref_tag(&mut tokens);

    let mut token_count = 0;
    let mut word_count = 0;
    let mut content = 0;
    let mut total_len = 0;
    let mut distinct: Vec<String> = Vec::new();
    let mut hist: Vec<(&'static str, usize)> = Vec::new();
    for t in &tokens {
        if t.kind != "Punct" {
            token_count += 1;
        }
        if t.kind == "Word" {
            word_count += 1;
            total_len += t.surface.chars().count();
            if matches!(t.pos, "Noun" | "Verb" | "Adj" | "Adv") {
                content += 1;
            }
            if !distinct.contains(&t.lower) {
                distinct.push(t.lower.clone());
            }
            match hist.iter_mut().find(|(p, _)| *p == t.pos) {
                Some(entry) => entry.1 += 1,
                None => hist.push((t.pos, 1)),
            }
        }
    }
    hist.sort_by(|a, b| a.0.cmp(b.0));

    let sentences = ref_sentences(&tokens);
    let clause_depths: Vec<usize> = sentences.iter().map(|s| ref_depth(&tokens, s)).collect();

    let (content_ratio, mean_word_length, lexical_diversity) = if word_count == 0 {
        (0.0, 0.0, 0.0)
    } else {
        let n = word_count as f64;
        (content as f64 / n, total_len as f64 / n, distinct.len() as f64 / n)
    };
    Some(RefFeatures {
        token_count,
        sentence_count: sentences.len(),
        clause_depths,
        pos_histogram: hist,
        content_ratio,
        mean_word_length,
        lexical_diversity,
    })
}

/// Scroll width by literally laying panels out one after another.
pub fn ref_total_width(widths: &[u32], overlap: u32) -> u64 {
    let mut right_edge: u64 = 0;
    for (i, w) in widths.iter().enumerate() {
        let start = if i == 0 { 0 } else { right_edge - overlap as u64 };
        right_edge = start + *w as u64;
    }
    right_edge
}

/// Linear blend of two channel values at `t = num/den`, computed in
/// floating point and rounded half up.
pub fn ref_blend(left: u8, right: u8, num: u32, den: u32) -> u8 {
    let t = num as f64 / den as f64;
    let v = left as f64 * (1.0 - t) + right as f64 * t;
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// 32-bit FNV-1a, written out with the published constants.
pub fn ref_fnv1a32(bytes: &[u8]) -> u32 {
    let mut h: u32 = 2_166_136_261;
    for b in bytes {
        h ^= *b as u32;
        h = h.wrapping_mul(16_777_619);
    }
    h
}
