//! Property tests for the text-level invariants: encode/decode round trip
//! under a covering vocabulary, splitter totality and idempotence, and
//! character accounting of the sentence splitter.

use proptest::prelude::*;
use t2t_core::tokenizer::{normalize, sentence_split, word_tokenize, Vocab};

const LEXICON: &[&str] = &[
    "kot", "pies", "dom", "las", "mama", "tata", "woda", "ogień", "zima", "lato",
    "książka", "miasto", "droga", "chleb", "mleko", "śnieg", "wiatr", "słońce", "gwiazda",
    "ryba", "ptak", "drzewo", "kwiat", "trawa", "żaba", "jabłko", "gruszka", "ćma",
];

/// Covering vocabulary: every word as a marked piece plus every single
/// character (marked and unmarked) so any lexicon text is fully coverable.
fn covering_vocab() -> Vocab {
    let mut entries = vec![
        ("<pad>".to_string(), 0.0),
        ("</s>".to_string(), 0.0),
        ("<unk>".to_string(), 0.0),
    ];
    let push = |s: String, score: f64, entries: &mut Vec<(String, f64)>| {
        if !entries.iter().any(|(p, _)| *p == s) {
            entries.push((s, score));
        }
    };
    for word in LEXICON {
        push(format!("\u{2581}{word}"), -2.0, &mut entries);
        for c in word.chars() {
            push(c.to_string(), -10.0, &mut entries);
            push(format!("\u{2581}{c}"), -10.5, &mut entries);
        }
    }
    push("\u{2581}".to_string(), -11.0, &mut entries);
    Vocab::from_entries(entries).unwrap()
}

fn lexicon_text() -> impl Strategy<Value = String> {
    proptest::collection::vec(proptest::sample::select(LEXICON.to_vec()), 0..12)
        .prop_map(|words| words.join(" "))
}

proptest! {
    #[test]
    fn round_trip_equals_normalize(text in lexicon_text()) {
        let vocab = covering_vocab();
        let seq = vocab.encode(&text);
        prop_assert!(seq.ids.iter().all(|&id| !vocab.is_special(id)));
        let decoded = vocab.decode(&seq).unwrap();
        prop_assert_eq!(decoded, normalize(&text));
    }

    #[test]
    fn round_trip_with_messy_whitespace(words in proptest::collection::vec(proptest::sample::select(LEXICON.to_vec()), 1..8),
                                        seps in proptest::collection::vec("[ \t\n]{1,3}", 0..7)) {
        let mut text = String::new();
        for (i, w) in words.iter().enumerate() {
            if i > 0 {
                text.push_str(seps.get(i - 1).map(|s| s.as_str()).unwrap_or(" "));
            }
            text.push_str(w);
        }
        let vocab = covering_vocab();
        let decoded = vocab.decode(&vocab.encode(&text)).unwrap();
        prop_assert_eq!(decoded, normalize(&text));
    }

    #[test]
    fn word_tokenize_total_and_idempotent(text in "[a-ząćęłńóśźż ,.!?()-]{0,60}") {
        let tokens = word_tokenize(&text);
        let rejoined = tokens.join(" ");
        let retokenized = word_tokenize(&rejoined);
        prop_assert_eq!(tokens, retokenized);
    }

    #[test]
    fn sentence_split_preserves_characters(words in proptest::collection::vec(proptest::sample::select(LEXICON.to_vec()), 1..20),
                                           sentence_len in 2..6usize) {
        // Build sentences of fixed word counts, capitalized, dot-terminated.
        let mut text = String::new();
        for (i, chunk) in words.chunks(sentence_len).enumerate() {
            if i > 0 {
                text.push(' ');
            }
            let mut sentence = chunk.join(" ");
            let mut chars = sentence.chars();
            let first = chars.next().unwrap().to_uppercase().to_string();
            sentence = format!("{first}{}", chars.as_str());
            text.push_str(&sentence);
            text.push('.');
        }
        let sentences = sentence_split(&text);
        // Re-joining with single spaces reproduces the input exactly
        // (boundaries here are single spaces already).
        prop_assert_eq!(sentences.join(" "), text.clone());
        // Character accounting: non-boundary characters are partitioned.
        let sum: usize = sentences.iter().map(|s| s.chars().count()).sum();
        let boundaries = sentences.len().saturating_sub(1);
        prop_assert_eq!(sum + boundaries, text.chars().count());
    }

    #[test]
    fn sentence_split_idempotent_per_sentence(text in "[A-ZĆŁŚŻ][a-ząćęłńóśźż ]{0,40}[.!?]") {
        let first = sentence_split(&text);
        for s in &first {
            let again = sentence_split(s);
            prop_assert_eq!(again.len(), 1);
            prop_assert_eq!(&again[0], s);
        }
    }
}

#[test]
fn covering_vocab_round_trips_diacritics() {
    let vocab = covering_vocab();
    for text in ["żaba śpi", "ćma i kot", "jabłko gruszka śnieg"] {
        let decoded = vocab.decode(&vocab.encode(text)).unwrap();
        assert_eq!(decoded, text);
    }
}
