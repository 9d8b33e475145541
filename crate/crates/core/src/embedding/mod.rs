//! Token embeddings, mean pooling and cosine similarity.
//!
//! An [`Embedder`] turns a normalized sentence into per-token vectors with
//! character offsets. Segments and whole sentences are pooled from those
//! vectors by arithmetic mean.

mod mock;
mod service;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use mock::MockEmbedder;
pub use service::{EmbedRequest, EmbedResponse, HealthStatus, ServiceEmbedder, ServiceToken};

use crate::error::EmbeddingError;
use crate::text_norm::NormalizedText;

pub const DEFAULT_MODEL_ID: &str = "roberta-base";
/// Hidden size of roberta-base; the mock backend uses the same width.
pub const DEFAULT_DIM: usize = 768;

/// Per-token vectors of one sentence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenEmbeddings {
    pub vectors: Vec<Vec<f64>>,
    /// `[start, end)` character spans, ordered and non-overlapping.
    pub offsets: Vec<(usize, usize)>,
    pub dim: usize,
}

impl TokenEmbeddings {
    pub fn new(
        vectors: Vec<Vec<f64>>,
        offsets: Vec<(usize, usize)>,
        dim: usize,
    ) -> Result<Self, EmbeddingError> {
        if vectors.is_empty() {
            return Err(EmbeddingError::NoTokens);
        }
        if vectors.len() != offsets.len() {
            return Err(EmbeddingError::Protocol(format!(
                "{} vectors but {} offsets",
                vectors.len(),
                offsets.len()
            )));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(EmbeddingError::DimensionMismatch {
                left: v.len(),
                right: dim,
            });
        }
        let mut prev_end = 0;
        for (i, &(s, e)) in offsets.iter().enumerate() {
            if s >= e || (i > 0 && s < prev_end) {
                return Err(EmbeddingError::Protocol(format!(
                    "token {i} has invalid or overlapping offsets ({s}, {e})"
                )));
            }
            prev_end = e;
        }
        Ok(Self {
            vectors,
            offsets,
            dim,
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Mean-pooled vector of one segment (or whole sentence).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentEmbedding {
    pub vector: Vec<f64>,
    pub token_count: usize,
}

/// Source of contextual token embeddings.
pub trait Embedder: Send + Sync {
    fn embed_tokens(&self, text: &NormalizedText) -> Result<TokenEmbeddings, EmbeddingError>;

    fn model_id(&self) -> &str;
}

impl<E: Embedder + ?Sized> Embedder for Arc<E> {
    fn embed_tokens(&self, text: &NormalizedText) -> Result<TokenEmbeddings, EmbeddingError> {
        (**self).embed_tokens(text)
    }

    fn model_id(&self) -> &str {
        (**self).model_id()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "snake_case")]
pub enum Backend {
    Mock { seed: u64, dim: usize },
    Service { url: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedderConfig {
    pub backend: Backend,
    pub model_id: String,
}

impl Default for EmbedderConfig {
    fn default() -> Self {
        Self::mock(0)
    }
}

impl EmbedderConfig {
    pub fn mock(seed: u64) -> Self {
        Self {
            backend: Backend::Mock {
                seed,
                dim: DEFAULT_DIM,
            },
            model_id: DEFAULT_MODEL_ID.to_string(),
        }
    }

    pub fn service(url: impl Into<String>) -> Self {
        Self {
            backend: Backend::Service { url: url.into() },
            model_id: DEFAULT_MODEL_ID.to_string(),
        }
    }

    pub fn build(&self) -> Result<Arc<dyn Embedder>, EmbeddingError> {
        match &self.backend {
            Backend::Mock { seed, dim } => {
                if *dim == 0 {
                    return Err(EmbeddingError::Config(
                        "mock dimension must be positive".into(),
                    ));
                }
                Ok(Arc::new(MockEmbedder::new(*seed, *dim)))
            }
            Backend::Service { url } => {
                if url.trim().is_empty() {
                    return Err(EmbeddingError::Config(
                        "service backend requires a url".into(),
                    ));
                }
                Ok(Arc::new(ServiceEmbedder::new(
                    url.clone(),
                    self.model_id.clone(),
                )))
            }
        }
    }
}

fn mean_of<'a>(dim: usize, vectors: impl Iterator<Item = &'a Vec<f64>>) -> SegmentEmbedding {
    let mut sum = vec![0.0; dim];
    let mut count = 0;
    for v in vectors {
        for (s, x) in sum.iter_mut().zip(v) {
            *s += x;
        }
        count += 1;
    }
    let k = count as f64;
    for s in &mut sum {
        *s /= k;
    }
    SegmentEmbedding {
        vector: sum,
        token_count: count,
    }
}

fn gap(token: (usize, usize), span: (usize, usize)) -> usize {
    // Zero when the ranges overlap; otherwise the distance between them.
    span.0
        .saturating_sub(token.1)
        .max(token.0.saturating_sub(span.1))
}

/// Mean of every token overlapping `span`. When no token overlaps, the
/// nearest token by character distance (earliest on ties) is used alone.
pub fn pool_segment(
    emb: &TokenEmbeddings,
    span: (usize, usize),
) -> Result<SegmentEmbedding, EmbeddingError> {
    if emb.is_empty() {
        return Err(EmbeddingError::NoTokens);
    }
    let (a, b) = span;
    // Offsets are ordered and disjoint, so the overlapping tokens are one run.
    let first = emb.offsets.partition_point(|&(_, e)| e <= a);
    let len = emb.offsets[first..].partition_point(|&(s, _)| s < b);
    match len {
        0 => {}
        1 => {
            return Ok(SegmentEmbedding {
                vector: emb.vectors[first].clone(),
                token_count: 1,
            })
        }
        _ => return Ok(mean_of(emb.dim, emb.vectors[first..first + len].iter())),
    }
    let nearest = emb
        .offsets
        .iter()
        .enumerate()
        .min_by_key(|(_, &off)| gap(off, span))
        .map(|(i, _)| i)
        .unwrap_or(0);
    Ok(SegmentEmbedding {
        vector: emb.vectors[nearest].clone(),
        token_count: 1,
    })
}

/// Mean over all tokens of the sentence.
pub fn sentence_embedding(emb: &TokenEmbeddings) -> Result<SegmentEmbedding, EmbeddingError> {
    if emb.is_empty() {
        return Err(EmbeddingError::NoTokens);
    }
    Ok(mean_of(emb.dim, emb.vectors.iter()))
}

/// Plain cosine similarity.
///
/// Computed as `dot / sqrt(|u|^2 |v|^2)` with all three sums accumulated in
/// one pass, which makes `cosine(u, u)` exactly 1.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64, EmbeddingError> {
    if u.len() != v.len() {
        return Err(EmbeddingError::DimensionMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let (mut dot, mut nu, mut nv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(EmbeddingError::ZeroVector);
    }
    Ok((dot / (nu * nv).sqrt()).clamp(-1.0, 1.0))
}

/// Counts cosine evaluations made during one metric evaluation.
#[derive(Debug, Default)]
pub struct CosineCounter {
    calls: AtomicUsize,
}

impl CosineCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cosine(&self, u: &[f64], v: &[f64]) -> Result<f64, EmbeddingError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        cosine(u, v)
    }

    /// Records a comparison against an absent (zero) vector, which resolves
    /// without arithmetic.
    pub fn record_degenerate(&self) {
        self.calls.fetch_add(1, Ordering::Relaxed);
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn emb(vectors: Vec<Vec<f64>>, offsets: Vec<(usize, usize)>) -> TokenEmbeddings {
        let dim = vectors[0].len();
        TokenEmbeddings::new(vectors, offsets, dim).unwrap()
    }

    #[test]
    fn pooling_examples() {
        let e = emb(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![(0, 4), (5, 9)]);
        let one = pool_segment(&e, (0, 4)).unwrap();
        assert_eq!(one.vector, vec![1.0, 0.0]);
        assert_eq!(one.token_count, 1);
        let both = pool_segment(&e, (0, 9)).unwrap();
        assert_eq!(both.vector, vec![0.5, 0.5]);
        assert_eq!(both.token_count, 2);
        let gap = pool_segment(&e, (4, 5)).unwrap();
        assert_eq!(gap.vector, vec![1.0, 0.0]);
        assert_eq!(gap.token_count, 1);
        let far = pool_segment(&e, (12, 14)).unwrap();
        assert_eq!(far.vector, vec![0.0, 1.0]);
    }

    #[test]
    fn sentence_embedding_examples() {
        let single = emb(vec![vec![0.3, 0.4]], vec![(0, 3)]);
        assert_eq!(sentence_embedding(&single).unwrap().vector, vec![0.3, 0.4]);
        let two = emb(vec![vec![2.0, 0.0], vec![0.0, 2.0]], vec![(0, 1), (2, 3)]);
        assert_eq!(sentence_embedding(&two).unwrap().vector, vec![1.0, 1.0]);
        assert_eq!(
            sentence_embedding(&two).unwrap(),
            pool_segment(&two, (0, 3)).unwrap()
        );
    }

    #[test]
    fn token_embeddings_validate() {
        assert_eq!(
            TokenEmbeddings::new(vec![], vec![], 2),
            Err(EmbeddingError::NoTokens)
        );
        assert!(TokenEmbeddings::new(vec![vec![1.0]], vec![(0, 1)], 2).is_err());
        assert!(TokenEmbeddings::new(vec![vec![1.0], vec![1.0]], vec![(0, 3), (2, 4)], 1).is_err());
    }

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine(&[0.3, -2.0, 7.0], &[0.3, -2.0, 7.0]).unwrap(), 1.0);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(cosine(&[1.0, 0.0], &[-1.0, 0.0]).unwrap(), -1.0);
        assert_eq!(
            cosine(&[0.0, 0.0], &[1.0, 0.0]),
            Err(EmbeddingError::ZeroVector)
        );
        assert!(matches!(
            cosine(&[1.0], &[1.0, 0.0]),
            Err(EmbeddingError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn counter_counts_every_call() {
        let c = CosineCounter::new();
        let _ = c.cosine(&[1.0], &[1.0]);
        let _ = c.cosine(&[0.0], &[1.0]);
        c.record_degenerate();
        assert_eq!(c.calls(), 3);
    }

    #[test]
    fn config_validation() {
        assert!(EmbedderConfig::service("  ").build().is_err());
        let cfg = EmbedderConfig {
            backend: Backend::Mock { seed: 1, dim: 0 },
            model_id: DEFAULT_MODEL_ID.into(),
        };
        assert!(cfg.build().is_err());
        assert_eq!(
            EmbedderConfig::default().build().unwrap().model_id(),
            "roberta-base"
        );
    }

    proptest! {
        #[test]
        fn cosine_self_and_symmetry(
            u in prop::collection::vec(-100.0f64..100.0, 1..64),
            seed in prop::collection::vec(-100.0f64..100.0, 64),
        ) {
            prop_assume!(u.iter().any(|x| *x != 0.0));
            let v: Vec<f64> = seed[..u.len()].to_vec();
            prop_assume!(v.iter().any(|x| *x != 0.0));
            prop_assert!((cosine(&u, &u).unwrap() - 1.0).abs() <= 1e-12);
            let (a, b) = (cosine(&u, &v).unwrap(), cosine(&v, &u).unwrap());
            prop_assert!((a - b).abs() <= 1e-12);
            prop_assert!((-1.0..=1.0).contains(&a));
        }
    }
}
