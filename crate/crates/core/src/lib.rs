//! Segment-wise, semantics-aware scoring of speech recognition output.
//!
//! The ground truth and hypothesis are aligned character by character, the
//! alignment is turned into matching word groups (segments), and each segment
//! is scored by the cosine similarity of its pooled contextual embeddings,
//! penalized by its character-level match error rate. Segments are weighted
//! by how similar they are to the whole ground-truth sentence.
//!
//! ```
//! use semascore::{EmbedderConfig, Scorer};
//!
//! let scorer = Scorer::from_config(&EmbedderConfig::mock(0)).unwrap();
//! let report = scorer.score("I want to have a sandwich", "I want to have a sandwich").unwrap();
//! assert_eq!(report.semascore, 1.0);
//! ```

pub mod alignment;
pub mod corpus;
pub mod embedding;
pub mod error;
pub mod error_metrics;
pub mod scoring;
pub mod text_norm;

pub use alignment::{
    char_align, map_segments, CharAlignment, EditKind, EditOp, SegmentMapping, SegmentPair,
};
pub use corpus::{
    benchmark, correlations, evaluate_corpus, load_corpus, BenchOptions, Coefficient, CorpusRecord,
    CorpusReport, EvalOptions, Format, TimingTable,
};
pub use embedding::{
    cosine, pool_segment, sentence_embedding, Backend, CosineCounter, Embedder, EmbedderConfig,
    MockEmbedder, SegmentEmbedding, ServiceEmbedder, TokenEmbeddings,
};
pub use error::{Error, Result};
pub use error_metrics::{cer, edit_counts, mer, wer, EditCounts};
pub use scoring::{
    greedy_match_baseline, importance_weight, segment_score, semascore, BaselineScore,
    DegenerateFlag, ScoreReport, Scorer, SegmentScoreRecord, ALPHA_FLOOR,
};
pub use text_norm::{
    normalize, normalize_with, tokenize_words, NormalizeOptions, NormalizedText, WordSpan,
};
