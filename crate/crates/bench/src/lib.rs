//! Shared fixtures for the criterion benchmarks.

use rand::prelude::IndexedRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use t2t_core::tokenizer::Vocab;

pub const WORDS: &[&str] = &[
    "kot", "pies", "dom", "las", "rzeka", "góra", "miasto", "droga", "most", "książka",
    "szkoła", "praca", "dzień", "noc", "zima", "lato", "śnieg", "deszcz", "słońce", "wiatr",
    "jabłko", "chleb", "mleko", "woda", "herbata", "żaba", "ptak", "ryba", "łąka", "pole",
];

/// Vocabulary with whole-word pieces, frequent bigrams of characters and
/// full character coverage; roughly the shape of a trained unigram vocab
/// scaled down.
pub fn bench_vocab() -> Vocab {
    let mut entries = vec![
        ("<pad>".to_string(), 0.0),
        ("</s>".to_string(), 0.0),
        ("<unk>".to_string(), 0.0),
    ];
    let mut seen = std::collections::HashSet::new();
    let mut push = |s: String, score: f64, entries: &mut Vec<(String, f64)>| {
        if seen.insert(s.clone()) {
            entries.push((s, score));
        }
    };
    for word in WORDS {
        push(format!("\u{2581}{word}"), -2.0, &mut entries);
        let chars: Vec<char> = word.chars().collect();
        for pair in chars.windows(2) {
            push(pair.iter().collect(), -6.0, &mut entries);
        }
        for c in chars {
            push(c.to_string(), -10.0, &mut entries);
            push(format!("\u{2581}{c}"), -10.5, &mut entries);
        }
    }
    push("\u{2581}".to_string(), -11.0, &mut entries);
    Vocab::from_entries(entries).unwrap()
}

pub fn sample_text(words: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = String::new();
    for i in 0..words {
        if i > 0 {
            text.push(' ');
        }
        text.push_str(WORDS.choose(&mut rng).unwrap());
    }
    text
}

pub fn sample_ids(vocab: &Vocab, n: usize, seed: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let regular: Vec<u32> = (0..vocab.len() as u32)
        .filter(|&id| !vocab.is_special(id))
        .collect();
    (0..n).map(|_| *regular.choose(&mut rng).unwrap()).collect()
}

pub fn corruption_vocab() -> Vocab {
    let mut entries = vec![
        ("<pad>".to_string(), 0.0),
        ("</s>".to_string(), 0.0),
        ("<unk>".to_string(), 0.0),
    ];
    for i in 0..1000 {
        entries.push((format!("p{i}"), -1.0));
    }
    for k in (0..100u32).rev() {
        entries.push((format!("<extra_id_{k}>"), 0.0));
    }
    Vocab::from_entries(entries).unwrap()
}

pub fn sample_ids_range(n: usize, seed: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(3..1003)).collect()
}
