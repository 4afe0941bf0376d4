//! Summarization baselines, the multi-reference human upper bound and
//! dataset statistics (abstractedness, compression ratio, trimming
//! coverage).

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{rouge, RougeScore};
use crate::tokenizer::{sentence_split, word_tokenize, Vocab};

#[derive(Debug, Error)]
pub enum SummError {
    #[error("source text is empty")]
    EmptySource,
    #[error("lead baseline needs n >= 1")]
    InvalidN,
    #[error("average target length must be positive, got {0}")]
    InvalidTargetLength(f64),
    #[error("no group provides a usable reference pair")]
    NoPairs,
    #[error("compression ratio undefined: average target length is zero")]
    UndefinedRatio,
    #[error("token limit must be >= 1")]
    InvalidLimit,
    #[error("n must be in 1..=5, got {0}")]
    InvalidNgramOrder(usize),
}

/// Declared summary-to-source length ratio of a reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum RatioTag {
    #[serde(rename = "5%")]
    R5,
    #[serde(rename = "10%")]
    R10,
    #[serde(rename = "20%")]
    R20,
    #[serde(rename = "unknown")]
    #[default]
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SummaryKind {
    Extract,
    Abstract,
    #[default]
    Unknown,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Reference {
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotator: Option<String>,
    #[serde(default)]
    pub ratio: RatioTag,
    #[serde(default)]
    pub kind: SummaryKind,
}

/// One source document with its reference summaries; the unit of
/// multi-reference evaluation. JSONL form:
/// `{"id": ..., "source": ..., "references": [{"text": ..., "ratio": ..., "kind": ...}, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummaryGroup {
    pub id: String,
    pub source: String,
    pub references: Vec<Reference>,
}

/// First `min(n, #sentences)` leading sentences of the source.
pub fn lead_baseline(source: &str, n: usize) -> Result<String, SummError> {
    if n < 1 {
        return Err(SummError::InvalidN);
    }
    let sentences = sentence_split(source);
    if sentences.is_empty() {
        return Err(SummError::EmptySource);
    }
    Ok(sentences[..n.min(sentences.len())].join(" "))
}

/// Leading sentences whose total character length best matches the average
/// target length; ties break toward fewer sentences.
pub fn adaptive_lead_baseline(source: &str, avg_target_len: f64) -> Result<String, SummError> {
    if avg_target_len <= 0.0 || avg_target_len.is_nan() {
        return Err(SummError::InvalidTargetLength(avg_target_len));
    }
    let sentences = sentence_split(source);
    if sentences.is_empty() {
        return Err(SummError::EmptySource);
    }
    let mut best_n = 1;
    let mut best_diff = f64::INFINITY;
    let mut len = 0usize;
    for (i, s) in sentences.iter().enumerate() {
        len += s.chars().count() + usize::from(i > 0); // joining space
        let diff = (len as f64 - avg_target_len).abs();
        if diff < best_diff {
            best_diff = diff;
            best_n = i + 1;
        }
    }
    Ok(sentences[..best_n].join(" "))
}

/// Aggregate of pairwise inter-reference ROUGE.
#[derive(Debug, Clone, Serialize)]
pub struct UpperBound {
    pub score: RougeScore,
    /// Ordered (candidate, reference) pairs scored.
    pub pairs: usize,
    /// Groups skipped for having fewer than two usable references.
    pub skipped_groups: usize,
}

/// Score every ordered pair of distinct references within each group and
/// average; an empirical ceiling for the metric. With `same_ratio`, only
/// pairs sharing a ratio tag are compared.
pub fn human_upper_bound(groups: &[SummaryGroup], same_ratio: bool) -> Result<UpperBound, SummError> {
    let mut sums = RougeSums::default();
    let mut pairs = 0usize;
    let mut skipped = 0usize;
    for group in groups {
        let mut group_pairs = 0usize;
        for (i, cand) in group.references.iter().enumerate() {
            for (j, reference) in group.references.iter().enumerate() {
                if i == j || (same_ratio && cand.ratio != reference.ratio) {
                    continue;
                }
                sums.add(&rouge(&cand.text, &reference.text));
                group_pairs += 1;
            }
        }
        if group_pairs == 0 {
            skipped += 1;
        } else {
            pairs += group_pairs;
        }
    }
    if pairs == 0 {
        return Err(SummError::NoPairs);
    }
    Ok(UpperBound {
        score: sums.mean(pairs),
        pairs,
        skipped_groups: skipped,
    })
}

#[derive(Default)]
struct RougeSums {
    p: [f64; 3],
    r: [f64; 3],
    f: [f64; 3],
    mean_f: f64,
}

impl RougeSums {
    fn add(&mut self, s: &RougeScore) {
        for (k, v) in [s.rouge1, s.rouge2, s.rouge_l].iter().enumerate() {
            self.p[k] += v.precision;
            self.r[k] += v.recall;
            self.f[k] += v.fmeasure;
        }
        self.mean_f += s.mean_f;
    }

    fn mean(&self, n: usize) -> RougeScore {
        let d = n as f64;
        let variant = |k: usize| crate::metrics::RougeVariant {
            precision: self.p[k] / d,
            recall: self.r[k] / d,
            fmeasure: self.f[k] / d,
        };
        RougeScore {
            rouge1: variant(0),
            rouge2: variant(1),
            rouge_l: variant(2),
            mean_f: self.mean_f / d,
        }
    }
}

/// Fraction of reference-summary n-gram types absent from the source
/// article, averaged over (summary, article) pairs. Summaries shorter than
/// `n` words are skipped. Set semantics: types, not occurrences.
pub fn abstractedness(groups: &[SummaryGroup], n: usize) -> Result<f64, SummError> {
    if !(1..=5).contains(&n) {
        return Err(SummError::InvalidNgramOrder(n));
    }
    let mut total = 0.0f64;
    let mut pairs = 0usize;
    for group in groups {
        let article_tokens = word_tokenize(&group.source);
        let article_grams: HashSet<&[String]> = if article_tokens.len() >= n {
            article_tokens.windows(n).collect()
        } else {
            HashSet::new()
        };
        for reference in &group.references {
            let summary_tokens = word_tokenize(&reference.text);
            if summary_tokens.len() < n {
                continue;
            }
            let summary_grams: HashSet<&[String]> = summary_tokens.windows(n).collect();
            let novel = summary_grams
                .iter()
                .filter(|g| !article_grams.contains(*g))
                .count();
            total += novel as f64 / summary_grams.len() as f64;
            pairs += 1;
        }
    }
    if pairs == 0 {
        return Err(SummError::NoPairs);
    }
    Ok(total / pairs as f64)
}

/// Average source length divided by average reference length, in
/// characters.
pub fn compression_ratio(groups: &[SummaryGroup]) -> Result<f64, SummError> {
    let mut src_sum = 0usize;
    let mut src_n = 0usize;
    let mut tgt_sum = 0usize;
    let mut tgt_n = 0usize;
    for group in groups {
        src_sum += group.source.chars().count();
        src_n += 1;
        for reference in &group.references {
            tgt_sum += reference.text.chars().count();
            tgt_n += 1;
        }
    }
    if src_n == 0 || tgt_n == 0 || tgt_sum == 0 {
        return Err(SummError::UndefinedRatio);
    }
    let avg_src = src_sum as f64 / src_n as f64;
    let avg_tgt = tgt_sum as f64 / tgt_n as f64;
    Ok(avg_src / avg_tgt)
}

/// Mean over sources of `min(1, limit / |encode(source)|)`: the average
/// fraction of source tokens that fit into a model reading at most
/// `limit` tokens.
pub fn trimming_coverage(
    groups: &[SummaryGroup],
    vocab: &Vocab,
    limit: usize,
) -> Result<f64, SummError> {
    if limit < 1 {
        return Err(SummError::InvalidLimit);
    }
    if groups.is_empty() {
        return Err(SummError::NoPairs);
    }
    let mut total = 0.0f64;
    for group in groups {
        let tokens = vocab.encode(&group.source).len();
        let covered = if tokens == 0 {
            1.0
        } else {
            (limit as f64 / tokens as f64).min(1.0)
        };
        total += covered;
    }
    Ok(total / groups.len() as f64)
}

/// Corpus-level statistics in the shape of the benchmark's dataset
/// overview table.
#[derive(Debug, Clone, Serialize)]
pub struct DatasetStats {
    pub groups: usize,
    pub references: usize,
    pub avg_source_len: f64,
    pub avg_target_len: f64,
    pub compression_ratio: f64,
    /// n -> fraction of novel n-gram types, n in 1..=5.
    pub abstractedness: BTreeMap<usize, f64>,
}

pub fn dataset_stats(groups: &[SummaryGroup]) -> Result<DatasetStats, SummError> {
    let ratio = compression_ratio(groups)?;
    let src_n = groups.len();
    let ref_n: usize = groups.iter().map(|g| g.references.len()).sum();
    let avg_source_len = groups
        .iter()
        .map(|g| g.source.chars().count())
        .sum::<usize>() as f64
        / src_n as f64;
    let avg_target_len = groups
        .iter()
        .flat_map(|g| &g.references)
        .map(|r| r.text.chars().count())
        .sum::<usize>() as f64
        / ref_n as f64;
    let mut abs = BTreeMap::new();
    for n in 1..=5 {
        if let Ok(v) = abstractedness(groups, n) {
            abs.insert(n, v);
        }
    }
    Ok(DatasetStats {
        groups: src_n,
        references: ref_n,
        avg_source_len,
        avg_target_len,
        compression_ratio: ratio,
        abstractedness: abs,
    })
}
