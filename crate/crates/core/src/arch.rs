//! Parameter accounting for the encoder-decoder transformer families the
//! benchmark compares. Counts cover exactly the trainable tensors of the
//! mT5-style architecture: token embeddings (plus a separate output head
//! when untied), per-layer attention projections, (optionally gated)
//! feed-forward blocks, RMS layer norms and the two relative-position
//! bias tables.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Buckets of the relative-position bias table (one table per stack).
pub const RELATIVE_POSITION_BUCKETS: u64 = 32;

/// Vocabulary size of the multilingual source checkpoints.
pub const MT5_VOCAB_SIZE: u64 = 250_112;
/// Vocabulary size of the Polish tokenizer.
pub const PLT5_VOCAB_SIZE: u64 = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchConfig {
    /// Layers per stack (the decoder mirrors the encoder).
    pub num_layers: u64,
    pub num_heads: u64,
    pub d_model: u64,
    pub d_ff: u64,
    /// Per-head key/value width; `num_heads * d_kv` is the attention
    /// projection width.
    pub d_kv: u64,
    pub vocab_size: u64,
    /// Whether the output head shares the input embedding matrix.
    pub tied_lm_head: bool,
    /// Three feed-forward matrices (gated) instead of two.
    pub gated_ffn: bool,
}

/// Labeled terms of the parameter count; `total` is their sum.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ParamBreakdown {
    pub input_embedding: u64,
    pub lm_head: u64,
    pub encoder_attention: u64,
    pub encoder_ffn: u64,
    pub encoder_layer_norms: u64,
    pub decoder_self_attention: u64,
    pub decoder_cross_attention: u64,
    pub decoder_ffn: u64,
    pub decoder_layer_norms: u64,
    pub final_layer_norms: u64,
    pub relative_position_bias: u64,
    pub total: u64,
}

/// Closed-form trainable-parameter count.
///
/// Per stack and layer: attention projects d_model -> num_heads*d_kv for
/// Q, K, V and back for O (4 matrices; the decoder adds 4 more for cross
/// attention); the feed-forward block holds 2 matrices of d_model x d_ff,
/// or 3 when gated; each attention/ffn sub-block carries one RMS-norm
/// scale of d_model. Each stack adds a final norm and one relative-
/// position bias table of RELATIVE_POSITION_BUCKETS x num_heads.
pub fn param_breakdown(cfg: &ArchConfig) -> ParamBreakdown {
    let inner = cfg.num_heads * cfg.d_kv;
    let attn = 4 * cfg.d_model * inner;
    let ffn_matrices = if cfg.gated_ffn { 3 } else { 2 };
    let ffn = ffn_matrices * cfg.d_model * cfg.d_ff;

    let input_embedding = cfg.vocab_size * cfg.d_model;
    let lm_head = if cfg.tied_lm_head { 0 } else { input_embedding };

    let encoder_attention = cfg.num_layers * attn;
    let encoder_ffn = cfg.num_layers * ffn;
    let encoder_layer_norms = cfg.num_layers * 2 * cfg.d_model;

    let decoder_self_attention = cfg.num_layers * attn;
    let decoder_cross_attention = cfg.num_layers * attn;
    let decoder_ffn = cfg.num_layers * ffn;
    let decoder_layer_norms = cfg.num_layers * 3 * cfg.d_model;

    let final_layer_norms = 2 * cfg.d_model;
    let relative_position_bias = 2 * RELATIVE_POSITION_BUCKETS * cfg.num_heads;

    let total = input_embedding
        + lm_head
        + encoder_attention
        + encoder_ffn
        + encoder_layer_norms
        + decoder_self_attention
        + decoder_cross_attention
        + decoder_ffn
        + decoder_layer_norms
        + final_layer_norms
        + relative_position_bias;

    ParamBreakdown {
        input_embedding,
        lm_head,
        encoder_attention,
        encoder_ffn,
        encoder_layer_norms,
        decoder_self_attention,
        decoder_cross_attention,
        decoder_ffn,
        decoder_layer_norms,
        final_layer_norms,
        relative_position_bias,
        total,
    }
}

pub fn param_count(cfg: &ArchConfig) -> u64 {
    param_breakdown(cfg).total
}

/// The three model sizes compared in the benchmark. Dimensions follow the
/// public mT5 checkpoints (untied output head, gated feed-forward), which
/// the Polish models were initialized from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Small,
    Base,
    Large,
}

impl Family {
    pub fn config(self, vocab_size: u64) -> ArchConfig {
        let (num_layers, num_heads, d_model, d_ff) = match self {
            Family::Small => (8, 6, 512, 1024),
            Family::Base => (12, 12, 768, 2048),
            Family::Large => (24, 16, 1024, 2816),
        };
        ArchConfig {
            num_layers,
            num_heads,
            d_model,
            d_ff,
            d_kv: 64,
            vocab_size,
            tied_lm_head: false,
            gated_ffn: true,
        }
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "small" => Ok(Family::Small),
            "base" => Ok(Family::Base),
            "large" => Ok(Family::Large),
            other => Err(format!("unknown family {other:?} (small|base|large)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn within(actual: u64, expected: u64, tol: f64) -> bool {
        let diff = (actual as f64 - expected as f64).abs();
        diff / expected as f64 <= tol
    }

    #[test]
    fn plt5_family_totals() {
        assert!(within(
            param_count(&Family::Small.config(PLT5_VOCAB_SIZE)),
            95_000_000,
            0.03
        ));
        assert!(within(
            param_count(&Family::Base.config(PLT5_VOCAB_SIZE)),
            275_000_000,
            0.03
        ));
        assert!(within(
            param_count(&Family::Large.config(PLT5_VOCAB_SIZE)),
            820_000_000,
            0.03
        ));
    }

    #[test]
    fn mt5_family_totals() {
        assert!(within(
            param_count(&Family::Small.config(MT5_VOCAB_SIZE)),
            300_000_000,
            0.03
        ));
        assert!(within(
            param_count(&Family::Base.config(MT5_VOCAB_SIZE)),
            582_000_000,
            0.03
        ));
        assert!(within(
            param_count(&Family::Large.config(MT5_VOCAB_SIZE)),
            1_230_000_000,
            0.03
        ));
    }

    #[test]
    fn vocab_difference_isolates_embeddings() {
        let small_pl = param_count(&Family::Small.config(PLT5_VOCAB_SIZE));
        let small_mt = param_count(&Family::Small.config(MT5_VOCAB_SIZE));
        let d_model = Family::Small.config(PLT5_VOCAB_SIZE).d_model;
        let expected = 2 * (MT5_VOCAB_SIZE - PLT5_VOCAB_SIZE) * d_model;
        assert_eq!(small_mt - small_pl, expected);
    }

    #[test]
    fn linear_in_vocab() {
        let base = Family::Base.config(1000);
        let more = Family::Base.config(1001);
        // untied: one extra row in embedding and head
        assert_eq!(param_count(&more) - param_count(&base), 2 * base.d_model);
        let tied = ArchConfig {
            tied_lm_head: true,
            ..base
        };
        let tied_more = ArchConfig {
            vocab_size: 1001,
            ..tied
        };
        assert_eq!(param_count(&tied_more) - param_count(&tied), base.d_model);
    }

    #[test]
    fn doubling_layers_doubles_layer_terms_only() {
        let cfg = Family::Small.config(PLT5_VOCAB_SIZE);
        let doubled = ArchConfig {
            num_layers: cfg.num_layers * 2,
            ..cfg
        };
        let a = param_breakdown(&cfg);
        let b = param_breakdown(&doubled);
        assert_eq!(b.encoder_attention, 2 * a.encoder_attention);
        assert_eq!(b.decoder_ffn, 2 * a.decoder_ffn);
        assert_eq!(b.input_embedding, a.input_embedding);
        assert_eq!(b.lm_head, a.lm_head);
    }

    #[test]
    fn monotone_in_every_dimension() {
        let cfg = Family::Small.config(PLT5_VOCAB_SIZE);
        let total = param_count(&cfg);
        for bumped in [
            ArchConfig { num_layers: cfg.num_layers + 1, ..cfg },
            ArchConfig { num_heads: cfg.num_heads + 1, ..cfg },
            ArchConfig { d_model: cfg.d_model + 1, ..cfg },
            ArchConfig { d_ff: cfg.d_ff + 1, ..cfg },
            ArchConfig { d_kv: cfg.d_kv + 1, ..cfg },
            ArchConfig { vocab_size: cfg.vocab_size + 1, ..cfg },
        ] {
            assert!(param_count(&bumped) > total);
        }
    }

    #[test]
    fn breakdown_sums_to_total() {
        let b = param_breakdown(&Family::Base.config(PLT5_VOCAB_SIZE));
        let sum = b.input_embedding
            + b.lm_head
            + b.encoder_attention
            + b.encoder_ffn
            + b.encoder_layer_norms
            + b.decoder_self_attention
            + b.decoder_cross_attention
            + b.decoder_ffn
            + b.decoder_layer_norms
            + b.final_layer_norms
            + b.relative_position_bias;
        assert_eq!(sum, b.total);
    }
}
