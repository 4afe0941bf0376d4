//! Scoring of predictions against references: ROUGE-1/2/L f-measures and
//! their arithmetic mean, corpus BLEU, exact-match accuracy, binary F1 and
//! the MAE-based rating score.
//!
//! All text-overlap metrics tokenize with [`word_tokenize`], which
//! lowercases, so they are case-insensitive.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::tokenizer::word_tokenize;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("prediction and reference counts differ: {preds} vs {refs}")]
    ArityError { preds: usize, refs: usize },
    #[error("metric undefined on empty input")]
    UndefinedMetric,
    #[error("gold label {0:?} does not parse as a rating")]
    InvalidGold(String),
    #[error("reference set {0} is empty")]
    EmptyReferenceSet(usize),
}

/// Precision, recall and f-measure of one ROUGE variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RougeVariant {
    pub precision: f64,
    pub recall: f64,
    pub fmeasure: f64,
}

impl RougeVariant {
    pub const ZERO: RougeVariant = RougeVariant {
        precision: 0.0,
        recall: 0.0,
        fmeasure: 0.0,
    };

    fn from_counts(overlap: usize, candidate: usize, reference: usize) -> Self {
        let precision = if candidate > 0 {
            overlap as f64 / candidate as f64
        } else {
            0.0
        };
        let recall = if reference > 0 {
            overlap as f64 / reference as f64
        } else {
            0.0
        };
        RougeVariant {
            precision,
            recall,
            fmeasure: fmeasure(precision, recall),
        }
    }
}

/// ROUGE-1, ROUGE-2 and ROUGE-L for one candidate/reference pair, plus the
/// arithmetic mean of the three f-measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RougeScore {
    pub rouge1: RougeVariant,
    pub rouge2: RougeVariant,
    pub rouge_l: RougeVariant,
    pub mean_f: f64,
}

pub fn fmeasure(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n && n > 0 {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

fn clipped_overlap(cand: &HashMap<&[String], usize>, reference: &HashMap<&[String], usize>) -> usize {
    cand.iter()
        .map(|(gram, &c)| c.min(*reference.get(gram).unwrap_or(&0)))
        .sum()
}

/// ROUGE-n: clipped n-gram overlap over [`word_tokenize`] output.
/// The reported metrics use n = 1 and n = 2.
pub fn rouge_n(candidate: &str, reference: &str, n: usize) -> RougeVariant {
    let cand_tokens = word_tokenize(candidate);
    let ref_tokens = word_tokenize(reference);
    rouge_n_tokens(&cand_tokens, &ref_tokens, n)
}

pub fn rouge_n_tokens(cand_tokens: &[String], ref_tokens: &[String], n: usize) -> RougeVariant {
    let cand_counts = ngram_counts(cand_tokens, n);
    let ref_counts = ngram_counts(ref_tokens, n);
    let overlap = clipped_overlap(&cand_counts, &ref_counts);
    let cand_total: usize = cand_counts.values().sum();
    let ref_total: usize = ref_counts.values().sum();
    RougeVariant::from_counts(overlap, cand_total, ref_total)
}

/// ROUGE-L: longest common subsequence over word tokens, the whole text
/// treated as a single token sequence.
pub fn rouge_l(candidate: &str, reference: &str) -> RougeVariant {
    let cand_tokens = word_tokenize(candidate);
    let ref_tokens = word_tokenize(reference);
    rouge_l_tokens(&cand_tokens, &ref_tokens)
}

pub fn rouge_l_tokens(cand_tokens: &[String], ref_tokens: &[String]) -> RougeVariant {
    let lcs = lcs_length(cand_tokens, ref_tokens);
    RougeVariant::from_counts(lcs, cand_tokens.len(), ref_tokens.len())
}

pub fn lcs_length<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for ai in a {
        for (j, bj) in b.iter().enumerate() {
            cur[j + 1] = if ai == bj {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// All three ROUGE variants and their mean f-measure.
pub fn rouge(candidate: &str, reference: &str) -> RougeScore {
    let cand_tokens = word_tokenize(candidate);
    let ref_tokens = word_tokenize(reference);
    let rouge1 = rouge_n_tokens(&cand_tokens, &ref_tokens, 1);
    let rouge2 = rouge_n_tokens(&cand_tokens, &ref_tokens, 2);
    let rouge_l = rouge_l_tokens(&cand_tokens, &ref_tokens);
    RougeScore {
        rouge1,
        rouge2,
        rouge_l,
        mean_f: (rouge1.fmeasure + rouge2.fmeasure + rouge_l.fmeasure) / 3.0,
    }
}

pub const BLEU_MAX_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, Default)]
pub struct BleuOptions {
    /// When set, an n-gram order with zero matches contributes
    /// `epsilon / total` instead of zeroing the whole score.
    pub smoothing_epsilon: Option<f64>,
}

/// Corpus-level BLEU-4 in [0, 100]: geometric mean of modified n-gram
/// precisions with a brevity penalty, one reference per candidate,
/// unsmoothed.
pub fn bleu<S1: AsRef<str>, S2: AsRef<str>>(
    candidates: &[S1],
    references: &[S2],
) -> Result<f64, MetricError> {
    bleu_with_options(candidates, references, BleuOptions::default())
}

pub fn bleu_with_options<S1: AsRef<str>, S2: AsRef<str>>(
    candidates: &[S1],
    references: &[S2],
    options: BleuOptions,
) -> Result<f64, MetricError> {
    let sets: Vec<Vec<&str>> = references.iter().map(|r| vec![r.as_ref()]).collect();
    bleu_multi_reference(candidates, &sets, options)
}

/// Corpus BLEU against one or more references per candidate. Clipping uses
/// the maximum reference count per n-gram; the brevity penalty uses the
/// reference length closest to each candidate (shorter wins ties).
pub fn bleu_multi_reference<S1: AsRef<str>, S2: AsRef<str>>(
    candidates: &[S1],
    reference_sets: &[Vec<S2>],
    options: BleuOptions,
) -> Result<f64, MetricError> {
    if candidates.len() != reference_sets.len() {
        return Err(MetricError::ArityError {
            preds: candidates.len(),
            refs: reference_sets.len(),
        });
    }
    if candidates.is_empty() {
        return Err(MetricError::UndefinedMetric);
    }

    let mut matches = [0usize; BLEU_MAX_ORDER];
    let mut totals = [0usize; BLEU_MAX_ORDER];
    let mut cand_len = 0usize;
    let mut ref_len = 0usize;

    for (i, (cand, refs)) in candidates.iter().zip(reference_sets).enumerate() {
        if refs.is_empty() {
            return Err(MetricError::EmptyReferenceSet(i));
        }
        let cand_tokens = word_tokenize(cand.as_ref());
        let ref_token_lists: Vec<Vec<String>> =
            refs.iter().map(|r| word_tokenize(r.as_ref())).collect();

        cand_len += cand_tokens.len();
        // Closest reference length; ties broken toward the shorter one.
        let closest = ref_token_lists
            .iter()
            .map(|t| t.len())
            .min_by_key(|&l| {
                let diff = (l as i64 - cand_tokens.len() as i64).abs();
                (diff, l)
            })
            .expect("nonempty reference set");
        ref_len += closest;

        for n in 1..=BLEU_MAX_ORDER {
            let cand_counts = ngram_counts(&cand_tokens, n);
            let mut clipped = 0usize;
            let ref_counts: Vec<HashMap<&[String], usize>> = ref_token_lists
                .iter()
                .map(|t| ngram_counts(t, n))
                .collect();
            for (gram, &c) in &cand_counts {
                let max_ref = ref_counts
                    .iter()
                    .map(|rc| *rc.get(gram).unwrap_or(&0))
                    .max()
                    .unwrap_or(0);
                clipped += c.min(max_ref);
            }
            matches[n - 1] += clipped;
            totals[n - 1] += cand_counts.values().sum::<usize>();
        }
    }

    if cand_len == 0 {
        return Ok(0.0);
    }

    // Orders with no candidate n-grams at all (corpus of very short
    // sentences) are excluded from the geometric mean so that identical
    // corpora still score 100.
    let mut log_sum = 0.0f64;
    let mut orders = 0usize;
    for n in 0..BLEU_MAX_ORDER {
        if totals[n] == 0 {
            continue;
        }
        orders += 1;
        let p = if matches[n] > 0 {
            matches[n] as f64 / totals[n] as f64
        } else {
            match options.smoothing_epsilon {
                Some(eps) => eps / totals[n] as f64,
                None => return Ok(0.0),
            }
        };
        log_sum += p.ln();
    }
    if orders == 0 {
        return Ok(0.0);
    }
    let precision_mean = (log_sum / orders as f64).exp();
    let bp = if cand_len >= ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / cand_len as f64).exp()
    };
    Ok(100.0 * bp * precision_mean)
}

fn check_lengths(preds: usize, refs: usize) -> Result<(), MetricError> {
    if preds != refs {
        return Err(MetricError::ArityError { preds, refs });
    }
    if preds == 0 {
        return Err(MetricError::UndefinedMetric);
    }
    Ok(())
}

/// Fraction of predictions byte-equal to their gold after whitespace
/// trimming.
pub fn exact_match_accuracy<S1: AsRef<str>, S2: AsRef<str>>(
    predictions: &[S1],
    golds: &[S2],
) -> Result<f64, MetricError> {
    check_lengths(predictions.len(), golds.len())?;
    let hits = predictions
        .iter()
        .zip(golds)
        .filter(|(p, g)| p.as_ref().trim() == g.as_ref().trim())
        .count();
    Ok(hits as f64 / predictions.len() as f64)
}

/// Binary F1 with respect to `positive_label`: 2TP / (2TP + FP + FN).
/// When nothing is labelled or predicted positive the score is 1.0.
pub fn f1_binary<S1: AsRef<str>, S2: AsRef<str>>(
    predictions: &[S1],
    golds: &[S2],
    positive_label: &str,
) -> Result<f64, MetricError> {
    check_lengths(predictions.len(), golds.len())?;
    let positive = positive_label.trim();
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for (p, g) in predictions.iter().zip(golds) {
        let pred_pos = p.as_ref().trim() == positive;
        let gold_pos = g.as_ref().trim() == positive;
        match (pred_pos, gold_pos) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        Ok(1.0)
    } else {
        Ok(2.0 * tp as f64 / denom as f64)
    }
}

/// 1 - wMAE, where wMAE is the macro-average over gold rating classes of
/// the mean absolute error. Golds must parse as ratings; predictions that
/// do not parse count as the maximal on-scale error of 4.0. The result can
/// drop below 0 for predictions far off the 1-5 scale.
pub fn ar_score<S1: AsRef<str>, S2: AsRef<str>>(
    predictions: &[S1],
    golds: &[S2],
) -> Result<f64, MetricError> {
    check_lengths(predictions.len(), golds.len())?;
    // Gold class -> absolute errors; keyed by bit pattern for exact grouping,
    // ordered so aggregation is deterministic.
    let mut classes: std::collections::BTreeMap<u64, Vec<f64>> = std::collections::BTreeMap::new();
    for (p, g) in predictions.iter().zip(golds) {
        let gold: f64 = g
            .as_ref()
            .trim()
            .parse()
            .map_err(|_| MetricError::InvalidGold(g.as_ref().to_string()))?;
        if !gold.is_finite() {
            return Err(MetricError::InvalidGold(g.as_ref().to_string()));
        }
        let err = match p.as_ref().trim().parse::<f64>() {
            Ok(pred) if pred.is_finite() => (pred - gold).abs(),
            _ => 4.0,
        };
        classes.entry(gold.to_bits()).or_default().push(err);
    }
    let wmae: f64 = classes
        .values()
        .map(|errs| errs.iter().sum::<f64>() / errs.len() as f64)
        .sum::<f64>()
        / classes.len() as f64;
    Ok(1.0 - wmae)
}

/// Aggregated result of one metric over a prediction file.
#[derive(Debug, Clone, Serialize)]
pub struct EvalSummary {
    pub metric: String,
    pub aggregate: f64,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_example: Option<Vec<f64>>,
}

impl EvalSummary {
    /// Mean of per-example scores.
    pub fn from_scores(metric: impl Into<String>, scores: Vec<f64>, keep: bool) -> Self {
        let n = scores.len();
        let aggregate = if n == 0 {
            0.0
        } else {
            scores.iter().sum::<f64>() / n as f64
        };
        EvalSummary {
            metric: metric.into(),
            aggregate,
            n,
            per_example: if keep { Some(scores) } else { None },
        }
    }

    /// Corpus-level metric (no meaningful per-example decomposition).
    pub fn corpus(metric: impl Into<String>, aggregate: f64, n: usize) -> Self {
        EvalSummary {
            metric: metric.into(),
            aggregate,
            n,
            per_example: None,
        }
    }
}
