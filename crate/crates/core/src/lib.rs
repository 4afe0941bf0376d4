//! Model-agnostic machinery for a Polish text-to-text benchmark suite:
//! unigram subword tokenization, span-corruption example generation,
//! cross-tokenizer embedding transfer, prompted task formatting with
//! exact-match label decoding, evaluation metrics (ROUGE, BLEU, accuracy,
//! F1, rating score) and summarization baselines with dataset statistics.
//!
//! No model is instantiated or executed anywhere in this crate; it covers
//! everything around a model: data preparation, vocabulary transfer, task
//! formatting and evaluation.

pub mod arch;
pub mod corruption;
pub mod metrics;
pub mod summarization;
pub mod tasks;
pub mod tokenizer;
pub mod transfer;
pub mod tuning;

pub use arch::{ArchConfig, Family, ParamBreakdown};
pub use corruption::{CorpusMixture, CorruptionConfig, DenoisingPair};
pub use metrics::{EvalSummary, RougeScore, RougeVariant};
pub use summarization::{DatasetStats, Reference, SummaryGroup};
pub use tasks::{ArchitectureStyle, FormattedExample, TaskSpec};
pub use tokenizer::{Segmentation, TokenSequence, Vocab};
pub use transfer::{EmbeddingMatrix, TransferReport};
pub use tuning::{GeometricSearchConfig, ScheduleConfig};
