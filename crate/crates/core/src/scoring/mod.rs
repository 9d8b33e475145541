//! The segment-wise metric and a greedy token-matching baseline.
//!
//! Per segment `i`, the similarity `SS_i` is the cosine between the mean-pooled
//! ground-truth and hypothesis segment embeddings (clamped to `[0, 1]`), the
//! segment score is `SS_i * (1 - MER_i)` with a character-level MER, and the
//! importance `alpha_i` is the cosine between the ground-truth segment and the
//! whole ground-truth sentence (floored at [`ALPHA_FLOOR`]). The final score
//! is the alpha-weighted mean of segment scores.

mod baseline;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use baseline::BaselineScore;

use crate::alignment::{char_align, map_segments};
use crate::embedding::{
    pool_segment, sentence_embedding, CosineCounter, Embedder, EmbedderConfig, SegmentEmbedding,
    TokenEmbeddings,
};
use crate::error::{EmbeddingError, Result};
use crate::error_metrics::{mer, wer, EditCounts};
use crate::text_norm::{normalize_with, tokenize_words, NormalizeOptions, NormalizedText};

/// Lower bound for importance weights; keeps the weight sum positive.
pub const ALPHA_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentScoreRecord {
    pub segment_index: usize,
    pub gt_text: String,
    pub h_text: String,
    pub ss: f64,
    pub mer: f64,
    pub seg_score: f64,
    pub alpha: f64,
}

/// Conditions under which a score was resolved by rule rather than by
/// arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DegenerateFlag {
    BothEmpty,
    EmptyReference,
    EmptyHypothesis,
    /// Ground-truth words with no hypothesis counterpart.
    DeletedSegment {
        segment: usize,
    },
    ZeroVector {
        segment: usize,
    },
    AlphaFloored {
        segment: usize,
    },
    /// Hypothesis words before the first aligned word were attached forward.
    LeadingInsertion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub semascore: f64,
    pub segments: Vec<SegmentScoreRecord>,
    pub alpha_sum: f64,
    /// `None` when the reference is empty.
    pub wer: Option<f64>,
    pub cer: Option<f64>,
    /// Character-level MER of the whole sentence pair.
    pub sentence_mer: f64,
    pub cosine_calls: usize,
    pub degenerate_flags: Vec<DegenerateFlag>,
}

impl ScoreReport {
    /// Recomputes the weighted mean from the per-segment records.
    pub fn recomputed_score(&self) -> Option<f64> {
        if self.segments.is_empty() {
            return None;
        }
        let (num, den) = self.segments.iter().fold((0.0, 0.0), |(n, d), s| {
            (n + s.alpha * s.seg_score, d + s.alpha)
        });
        Some(num / den)
    }
}

/// `ss * (1 - mer)`.
pub fn segment_score(ss: f64, mer: f64) -> f64 {
    ss * (1.0 - mer)
}

/// Cosine between a ground-truth segment and the whole ground truth, clamped
/// to `[ALPHA_FLOOR, 1]`. A zero vector yields the floor and `true`.
pub fn importance_weight(
    seg: &SegmentEmbedding,
    sent: &SegmentEmbedding,
    counter: &CosineCounter,
) -> std::result::Result<(f64, bool), EmbeddingError> {
    match counter.cosine(&seg.vector, &sent.vector) {
        Ok(c) => Ok((c.clamp(ALPHA_FLOOR, 1.0), false)),
        Err(EmbeddingError::ZeroVector) => Ok((ALPHA_FLOOR, true)),
        Err(e) => Err(e),
    }
}

/// A sentence pair after normalization and embedding, ready to be scored.
#[derive(Debug, Clone)]
pub struct PreparedPair {
    pub gt: NormalizedText,
    pub h: NormalizedText,
    pub gt_emb: Option<TokenEmbeddings>,
    pub h_emb: Option<TokenEmbeddings>,
}

/// Scores sentence pairs with a fixed embedder and normalization.
#[derive(Clone)]
pub struct Scorer {
    embedder: Arc<dyn Embedder>,
    norm: NormalizeOptions,
}

impl Scorer {
    pub fn new(embedder: Arc<dyn Embedder>, norm: NormalizeOptions) -> Self {
        Self { embedder, norm }
    }

    pub fn from_config(cfg: &EmbedderConfig) -> Result<Self> {
        Ok(Self::new(cfg.build()?, NormalizeOptions::default()))
    }

    pub fn with_normalization(mut self, norm: NormalizeOptions) -> Self {
        self.norm = norm;
        self
    }

    pub fn embedder(&self) -> &dyn Embedder {
        self.embedder.as_ref()
    }

    /// Normalizes both sides and embeds each non-empty sentence once. The
    /// hypothesis is only embedded when the ground truth is non-empty.
    pub fn prepare(&self, gt: &str, h: &str) -> Result<PreparedPair> {
        let gt = normalize_with(gt, &self.norm);
        let h = normalize_with(h, &self.norm);
        let gt_emb = if gt.is_empty() {
            None
        } else {
            Some(self.embedder.embed_tokens(&gt)?)
        };
        let h_emb = if h.is_empty() || gt.is_empty() {
            None
        } else {
            Some(self.embedder.embed_tokens(&h)?)
        };
        Ok(PreparedPair {
            gt,
            h,
            gt_emb,
            h_emb,
        })
    }

    pub fn score(&self, gt: &str, h: &str) -> Result<ScoreReport> {
        self.score_prepared(&self.prepare(gt, h)?)
    }

    pub fn baseline(&self, gt: &str, h: &str) -> Result<BaselineScore> {
        self.baseline_prepared(&self.prepare(gt, h)?)
    }

    pub fn baseline_prepared(&self, p: &PreparedPair) -> Result<BaselineScore> {
        baseline::greedy_match(p)
    }

    /// Runs alignment, segment mapping and the weighted aggregation on an
    /// already embedded pair.
    pub fn score_prepared(&self, p: &PreparedPair) -> Result<ScoreReport> {
        let gt_words = tokenize_words(&p.gt);
        let h_words = tokenize_words(&p.h);
        let gt_tokens: Vec<&str> = gt_words.iter().map(|w| w.word.as_str()).collect();
        let h_tokens: Vec<&str> = h_words.iter().map(|w| w.word.as_str()).collect();

        let alignment = char_align(&p.gt, &p.h);
        let counts = EditCounts::from_alignment(&alignment);
        let mut report = ScoreReport {
            semascore: 0.0,
            segments: Vec::new(),
            alpha_sum: 0.0,
            wer: wer(&gt_tokens, &h_tokens).ok(),
            cer: (counts.reference_len() > 0)
                .then(|| counts.errors() as f64 / counts.reference_len() as f64),
            sentence_mer: counts.match_error_rate(),
            cosine_calls: 0,
            degenerate_flags: Vec::new(),
        };

        match (p.gt.is_empty(), p.h.is_empty()) {
            (true, true) => {
                report.semascore = 1.0;
                report.degenerate_flags.push(DegenerateFlag::BothEmpty);
                return Ok(report);
            }
            (true, false) => {
                report.degenerate_flags.push(DegenerateFlag::EmptyReference);
                return Ok(report);
            }
            (false, true) => report
                .degenerate_flags
                .push(DegenerateFlag::EmptyHypothesis),
            (false, false) => {}
        }

        let mapping = map_segments(&gt_words, &h_words, &alignment)?;
        if mapping.leading_insertion {
            report
                .degenerate_flags
                .push(DegenerateFlag::LeadingInsertion);
        }
        let gt_emb = p.gt_emb.as_ref().ok_or(EmbeddingError::EmptyText)?;
        let sentence = sentence_embedding(gt_emb)?;
        let counter = CosineCounter::new();

        let mut weighted = 0.0;
        let mut alpha_sum = 0.0;
        for (i, seg) in mapping.segments.iter().enumerate() {
            // Every segment has ground-truth words when the reference is non-empty.
            let gt_span = seg.gt_span().ok_or(EmbeddingError::EmptyText)?;
            let e_gt = pool_segment(gt_emb, gt_span)?;

            let ss = match (seg.h_span(), p.h_emb.as_ref()) {
                (Some(h_span), Some(h_emb)) => {
                    let e_h = pool_segment(h_emb, h_span)?;
                    match counter.cosine(&e_gt.vector, &e_h.vector) {
                        Ok(c) => c.clamp(0.0, 1.0),
                        Err(EmbeddingError::ZeroVector) => {
                            report
                                .degenerate_flags
                                .push(DegenerateFlag::ZeroVector { segment: i });
                            0.0
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
                _ => {
                    counter.record_degenerate();
                    report
                        .degenerate_flags
                        .push(DegenerateFlag::DeletedSegment { segment: i });
                    0.0
                }
            };
            let seg_mer = mer(&seg.gt_text, &seg.h_text);
            let seg_score = segment_score(ss, seg_mer);
            let (alpha, zero) = importance_weight(&e_gt, &sentence, &counter)?;
            if zero {
                report
                    .degenerate_flags
                    .push(DegenerateFlag::ZeroVector { segment: i });
            } else if alpha == ALPHA_FLOOR {
                report
                    .degenerate_flags
                    .push(DegenerateFlag::AlphaFloored { segment: i });
            }

            weighted += alpha * seg_score;
            alpha_sum += alpha;
            report.segments.push(SegmentScoreRecord {
                segment_index: i,
                gt_text: seg.gt_text.clone(),
                h_text: seg.h_text.clone(),
                ss,
                mer: seg_mer,
                seg_score,
                alpha,
            });
        }

        report.semascore = weighted / alpha_sum;
        report.alpha_sum = alpha_sum;
        report.cosine_calls = counter.calls();
        Ok(report)
    }
}

/// Scores one pair with default normalization.
pub fn semascore(gt: &str, h: &str, cfg: &EmbedderConfig) -> Result<ScoreReport> {
    Scorer::from_config(cfg)?.score(gt, h)
}

pub fn greedy_match_baseline(gt: &str, h: &str, cfg: &EmbedderConfig) -> Result<BaselineScore> {
    Scorer::from_config(cfg)?.baseline(gt, h)
}
