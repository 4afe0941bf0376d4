//! Span-corruption example generation and size-weighted corpus mixture
//! sampling.
//!
//! `corrupt` replaces randomly placed, non-adjacent token spans with
//! sentinels and emits the (input, target) pair that reconstructs them.
//! All randomness flows through a seeded ChaCha8 generator, so pairs are
//! reproducible byte-for-byte across platforms; per-document generators
//! are derived with [`doc_rng`] (a splitmix64 mix of seed and document
//! index, see [`derive_doc_seed`]).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::tokenizer::Vocab;

#[derive(Debug, Error)]
pub enum CorruptionError {
    #[error("sequence of length {0} is too short to corrupt (minimum 2)")]
    TooShort(usize),
    #[error("input contains special or out-of-range token id {0}")]
    SpecialInInput(u32),
    #[error("vocabulary provides {available} sentinels but {needed} are needed")]
    InsufficientSentinels { available: u32, needed: u32 },
    #[error("corpus mixture is empty")]
    EmptyMixture,
    #[error("corpus {name:?} has zero size")]
    ZeroSize { name: String },
    #[error("invalid corruption config: {0}")]
    InvalidConfig(String),
}

/// Hyperparameters of the denoising objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorruptionConfig {
    /// Fraction of tokens to corrupt.
    pub corruption_rate: f64,
    /// Mean tokens per corrupted span.
    pub mean_span_length: f64,
    pub seed: u64,
}

impl Default for CorruptionConfig {
    fn default() -> Self {
        Self {
            corruption_rate: 0.15,
            mean_span_length: 3.0,
            seed: 0,
        }
    }
}

impl CorruptionConfig {
    pub fn new(corruption_rate: f64, mean_span_length: f64, seed: u64) -> Result<Self, CorruptionError> {
        if !(0.0..1.0).contains(&corruption_rate) {
            return Err(CorruptionError::InvalidConfig(format!(
                "corruption_rate {corruption_rate} not in [0, 1)"
            )));
        }
        if mean_span_length < 1.0 || !mean_span_length.is_finite() {
            return Err(CorruptionError::InvalidConfig(format!(
                "mean_span_length {mean_span_length} must be >= 1"
            )));
        }
        Ok(Self {
            corruption_rate,
            mean_span_length,
            seed,
        })
    }
}

/// One denoising example. Sentinels appear in the input in strictly
/// descending id order (`<extra_id_0>` first), each exactly once; the
/// target repeats them in the same order, each followed by the original
/// span, terminated by one final sentinel and EOS.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenoisingPair {
    pub input_ids: Vec<u32>,
    pub target_ids: Vec<u32>,
}

/// splitmix64 mix of the run seed and a document index; documented so that
/// per-document corruption is reproducible outside this crate.
pub fn derive_doc_seed(seed: u64, doc_index: u64) -> u64 {
    let mut z = seed ^ doc_index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-document generator for parallel corruption.
pub fn doc_rng(seed: u64, doc_index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_doc_seed(seed, doc_index))
}

/// Uniform composition of `total` into `parts` positive integers:
/// `parts - 1` distinct cut points drawn from 1..total.
fn random_composition(rng: &mut ChaCha8Rng, total: usize, parts: usize) -> Vec<usize> {
    debug_assert!(parts >= 1 && total >= parts);
    // Floyd's algorithm for a uniform (parts-1)-subset of {1, ..., total-1}.
    let k = parts - 1;
    let n = total - 1;
    let mut cuts: Vec<usize> = Vec::with_capacity(k);
    for j in (n - k + 1)..=n {
        let t = rng.random_range(1..=j);
        if cuts.contains(&t) {
            cuts.push(j);
        } else {
            cuts.push(t);
        }
    }
    cuts.sort_unstable();
    let mut lens = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts {
        lens.push(c - prev);
        prev = c;
    }
    lens.push(total - prev);
    lens
}

/// Uniform weak composition of `total` into `parts` nonnegative integers.
fn random_weak_composition(rng: &mut ChaCha8Rng, total: usize, parts: usize) -> Vec<usize> {
    let mut lens = random_composition(rng, total + parts, parts);
    for l in &mut lens {
        *l -= 1;
    }
    lens
}

/// Corrupt `ids` per the config: `c = max(1, round(rate * n))` tokens in
/// `s = max(1, round(c / mean_span_length))` spans, placed uniformly at
/// random with at least one uncorrupted token between spans and never
/// covering the whole sequence. Infeasible placements degrade by dropping
/// spans rather than erroring.
pub fn corrupt(
    cfg: &CorruptionConfig,
    ids: &[u32],
    vocab: &Vocab,
    rng: &mut ChaCha8Rng,
) -> Result<DenoisingPair, CorruptionError> {
    let n = ids.len();
    if n < 2 {
        return Err(CorruptionError::TooShort(n));
    }
    for &id in ids {
        if id >= vocab.len() as u32 || vocab.is_special(id) {
            return Err(CorruptionError::SpecialInInput(id));
        }
    }

    let mut c = (cfg.corruption_rate * n as f64).round() as usize;
    c = c.clamp(1, n - 1);
    let mut s = (c as f64 / cfg.mean_span_length).round() as usize;
    s = s.clamp(1, c);
    // Non-adjacency needs s-1 uncorrupted separators.
    while n - c < s - 1 {
        s -= 1;
    }

    let needed = s as u32 + 1;
    if needed > vocab.num_sentinels() {
        return Err(CorruptionError::InsufficientSentinels {
            available: vocab.num_sentinels(),
            needed,
        });
    }

    // Draw span lengths first, then gap sizes; both are uniform
    // compositions, so expected totals hit the configured rate exactly.
    let span_lens = random_composition(rng, c, s);
    let free = (n - c) - (s - 1);
    let mut gaps = random_weak_composition(rng, free, s + 1);
    for g in gaps.iter_mut().take(s).skip(1) {
        *g += 1; // interior separators
    }

    let mut input_ids = Vec::with_capacity(n - c + s);
    let mut target_ids = Vec::with_capacity(c + s + 2);
    let mut pos = 0usize;
    for (k, span_len) in span_lens.iter().enumerate() {
        let gap = gaps[k];
        input_ids.extend_from_slice(&ids[pos..pos + gap]);
        pos += gap;
        let sentinel = vocab.sentinel_id(k as u32).expect("checked above");
        input_ids.push(sentinel);
        target_ids.push(sentinel);
        target_ids.extend_from_slice(&ids[pos..pos + span_len]);
        pos += span_len;
    }
    input_ids.extend_from_slice(&ids[pos..pos + gaps[s]]);
    pos += gaps[s];
    debug_assert_eq!(pos, n);
    target_ids.push(vocab.sentinel_id(s as u32).expect("checked above"));
    target_ids.push(vocab.eos_id());

    Ok(DenoisingPair {
        input_ids,
        target_ids,
    })
}

/// Splice the target spans back into the input at sentinel positions,
/// reconstructing the original sequence. Used by tests and downstream
/// verification.
pub fn splice(pair: &DenoisingPair, vocab: &Vocab) -> Option<Vec<u32>> {
    use std::collections::HashMap;
    let mut spans: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut current: Option<u32> = None;
    for &id in &pair.target_ids {
        if id == vocab.eos_id() {
            break;
        }
        if vocab.is_special(id) {
            spans.entry(id).or_default();
            current = Some(id);
        } else {
            spans.get_mut(&current?)?.push(id);
        }
    }
    let mut out = Vec::new();
    for &id in &pair.input_ids {
        if vocab.is_special(id) {
            out.extend(spans.get(&id)?);
        } else {
            out.push(id);
        }
    }
    Some(out)
}

/// A size-weighted corpus mixture; selection probability is proportional
/// to corpus size.
#[derive(Debug, Clone)]
pub struct CorpusMixture {
    entries: Vec<(String, u64)>,
    total: u64,
}

impl CorpusMixture {
    pub fn new(corpora: Vec<(String, u64)>) -> Result<Self, CorruptionError> {
        if corpora.is_empty() {
            return Err(CorruptionError::EmptyMixture);
        }
        for (name, size) in &corpora {
            if *size == 0 {
                return Err(CorruptionError::ZeroSize { name: name.clone() });
            }
        }
        let total = corpora.iter().map(|(_, s)| s).sum();
        Ok(Self {
            entries: corpora,
            total,
        })
    }

    pub fn weights(&self) -> Vec<f64> {
        self.entries
            .iter()
            .map(|(_, s)| *s as f64 / self.total as f64)
            .collect()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    /// `k` independent draws; integer arithmetic, exact weights.
    pub fn sample(&self, rng: &mut ChaCha8Rng, k: usize) -> Vec<&str> {
        let mut out = Vec::with_capacity(k);
        for _ in 0..k {
            let mut x = rng.random_range(0..self.total);
            let mut chosen = self.entries.last().expect("nonempty");
            for entry in &self.entries {
                if x < entry.1 {
                    chosen = entry;
                    break;
                }
                x -= entry.1;
            }
            out.push(chosen.0.as_str());
        }
        out
    }
}
