//! Language analysis checked against the brute-force reference in
//! `equivalence-oracle`.

use equivalence_core::lang::{segment_clauses, tokenize, Analyzer, Lexicons, TokenKind};
use equivalence_core::Utterance;
use equivalence_oracle::fixtures::{self, DEPTH_PARAGRAPH, DEPTH_PARAGRAPH_DEPTHS, TAGGING_TEXT};
use equivalence_oracle::{ref_features, ref_sentences, ref_tag, ref_tokenize};
use proptest::prelude::*;

fn kind_name(k: TokenKind) -> &'static str {
    match k {
        TokenKind::Word => "Word",
        TokenKind::Number => "Number",
        TokenKind::Punct => "Punct",
    }
}

fn utterance(text: &str) -> Utterance {
    Utterance {
        id: "u".into(),
        session_id: "s".into(),
        text: text.into(),
        received_at: 0,
    }
}

fn assert_matches_reference(text: &str) {
    let reference = ref_features(text).expect("reference rejects non-empty text");
    let f = Analyzer::default().extract_features(&utterance(text)).unwrap();
    assert_eq!(f.token_count, reference.token_count, "token_count: {text}");
    assert_eq!(f.sentence_count, reference.sentence_count, "sentence_count: {text}");
    assert_eq!(f.clause_depths, reference.clause_depths, "clause_depths: {text}");
    let mut hist: Vec<(&str, usize)> = f.pos_histogram.iter().map(|(p, n)| (p.as_str(), *n)).collect();
    hist.sort();
    assert_eq!(hist, reference.pos_histogram, "pos_histogram: {text}");
    assert_eq!(f.content_ratio, reference.content_ratio, "content_ratio: {text}");
    assert_eq!(f.mean_word_length, reference.mean_word_length, "mean_word_length: {text}");
    assert_eq!(f.lexical_diversity, reference.lexical_diversity, "lexical_diversity: {text}");
}

#[test]
fn tokenizer_matches_reference_on_fifty_sentence_paragraph() {
    let text = fixtures::paragraph_50();
    let ours = tokenize(&text).unwrap();
    let reference = ref_tokenize(&text);
    assert_eq!(ours.len(), reference.len());
    for (a, b) in ours.iter().zip(&reference) {
        assert_eq!((a.surface.as_str(), a.lower.as_str(), kind_name(a.kind)), (b.surface.as_str(), b.lower.as_str(), b.kind));
    }
    let joined: String = ours.iter().map(|t| t.surface.as_str()).collect();
    let stripped: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    assert_eq!(joined, stripped);
}

#[test]
fn tagger_matches_reference_cascade() {
    assert!(TAGGING_TEXT.split_whitespace().count() >= 200);
    let ours = Analyzer::default().tokens(TAGGING_TEXT).unwrap();
    let mut reference = ref_tokenize(TAGGING_TEXT);
    ref_tag(&mut reference);
    let a: Vec<&str> = ours.iter().map(|t| t.pos.as_str()).collect();
    let b: Vec<&str> = reference.iter().map(|t| t.pos).collect();
    assert_eq!(a, b);
}

#[test]
fn depths_match_hand_count() {
    let tokens = Analyzer::default().tokens(DEPTH_PARAGRAPH).unwrap();
    let depths: Vec<usize> = segment_clauses(&tokens, &Lexicons::builtin()).iter().map(|s| s.depth).collect();
    assert_eq!(depths, DEPTH_PARAGRAPH_DEPTHS);
    assert_eq!(ref_sentences(&ref_tokenize(DEPTH_PARAGRAPH)).len(), DEPTH_PARAGRAPH_DEPTHS.len());
}

#[test]
fn features_match_reference_on_fixture_corpus() {
    let corpus = fixtures::utterances();
    assert_eq!(corpus.len(), 50);
    for text in corpus {
        assert_matches_reference(text);
    }
}

#[test]
fn features_match_reference_on_random_utterances() {
    for text in fixtures::random_utterances(200, 0xfeed) {
        assert_matches_reference(&text);
    }
}

fn text_strategy() -> impl Strategy<Value = String> {
    let word = prop_oneof![
        prop::sample::select(fixtures::WORD_POOL.to_vec()).prop_map(String::from),
        "[a-zA-Z']{1,9}",
        "[0-9]{1,4}",
        prop::sample::select(vec![".", "!", "?", ",", ";", "...", "?!", "—", "雨"]).prop_map(String::from),
    ];
    prop::collection::vec(word, 1..30).prop_map(|ws| ws.join(" "))
}

proptest! {
    #[test]
    fn features_agree_with_reference(text in text_strategy()) {
        prop_assume!(!text.trim().is_empty());
        assert_matches_reference(&text);
    }

    #[test]
    fn deterministic(text in text_strategy()) {
        prop_assume!(!text.trim().is_empty());
        let a = Analyzer::default();
        prop_assert_eq!(a.analyze(&text).unwrap(), a.analyze(&text).unwrap());
    }

    #[test]
    fn appending_a_sentence_is_monotone(text in text_strategy(), extra in text_strategy()) {
        prop_assume!(!text.trim().is_empty() && !extra.trim().is_empty());
        let a = Analyzer::default();
        let before = a.analyze(&text).unwrap().features;
        let after = a.analyze(&format!("{text}. {extra}")).unwrap().features;
        prop_assert!(after.token_count >= before.token_count);
        prop_assert!(after.sentence_count >= before.sentence_count);
    }

    #[test]
    fn ratios_in_bounds(text in text_strategy()) {
        prop_assume!(!text.trim().is_empty());
        let a = Analyzer::default().analyze(&text).unwrap();
        let f = &a.features;
        prop_assert!((0.0..=1.0).contains(&f.content_ratio));
        let words = a.tokens.iter().filter(|t| t.kind == TokenKind::Word).count();
        prop_assert_eq!(f.pos_histogram.values().sum::<usize>(), words);
        if words > 0 {
            prop_assert!(f.lexical_diversity > 0.0 && f.lexical_diversity <= 1.0);
        }
        prop_assert_eq!(f.clause_depths.len(), f.sentence_count);
        prop_assert!(f.sentence_count >= 1);
        prop_assert!(f.clause_depths.iter().all(|d| *d >= 1));
        for t in &a.tokens {
            if t.kind == TokenKind::Punct {
                prop_assert_eq!(t.pos, equivalence_core::Pos::Other);
            }
            prop_assert_eq!(&t.lower, &t.surface.to_lowercase());
        }
    }
}
