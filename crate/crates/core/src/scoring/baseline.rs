use serde::{Deserialize, Serialize};

use super::PreparedPair;
use crate::embedding::CosineCounter;
use crate::error::{EmbeddingError, Result};

/// Greedy token-matching score: every token is matched to its most similar
/// counterpart on the other side, precision and recall are the mean matched
/// similarities, and the score is their harmonic mean. No idf weighting, no
/// rescaling. Used for call-count and correlation comparisons only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineScore {
    pub score: f64,
    pub precision: f64,
    pub recall: f64,
    pub cosine_calls: usize,
}

pub(super) fn greedy_match(p: &PreparedPair) -> Result<BaselineScore> {
    let (gt, h) = match (&p.gt_emb, &p.h_emb) {
        (Some(g), Some(h)) => (g, h),
        _ => {
            let v = if p.gt.is_empty() && p.h.is_empty() {
                1.0
            } else {
                0.0
            };
            return Ok(BaselineScore {
                score: v,
                precision: v,
                recall: v,
                cosine_calls: 0,
            });
        }
    };

    let counter = CosineCounter::new();
    let (n, m) = (gt.len(), h.len());
    let mut sims = vec![0.0; n * m];
    for i in 0..n {
        for j in 0..m {
            sims[i * m + j] = match counter.cosine(&gt.vectors[i], &h.vectors[j]) {
                Ok(c) => c.clamp(0.0, 1.0),
                Err(EmbeddingError::ZeroVector) => 0.0,
                Err(e) => return Err(e.into()),
            };
        }
    }

    let recall = (0..n)
        .map(|i| sims[i * m..(i + 1) * m].iter().copied().fold(0.0, f64::max))
        .sum::<f64>()
        / n as f64;
    let precision = (0..m)
        .map(|j| (0..n).map(|i| sims[i * m + j]).fold(0.0, f64::max))
        .sum::<f64>()
        / m as f64;
    let score = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(BaselineScore {
        score,
        precision,
        recall,
        cosine_calls: counter.calls(),
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::embedding::{Embedder, EmbedderConfig, TokenEmbeddings};
    use crate::scoring::Scorer;
    use crate::text_norm::{NormalizeOptions, NormalizedText};

    struct Fixed;

    impl Embedder for Fixed {
        fn embed_tokens(
            &self,
            text: &NormalizedText,
        ) -> std::result::Result<TokenEmbeddings, EmbeddingError> {
            let v = if text.as_str() == "x" {
                vec![1.0, 0.0]
            } else {
                vec![0.0, 1.0]
            };
            TokenEmbeddings::new(vec![v], vec![(0, text.char_len())], 2)
        }

        fn model_id(&self) -> &str {
            "fixed"
        }
    }

    #[test]
    fn identity_is_one() {
        let s = Scorer::from_config(&EmbedderConfig::mock(3)).unwrap();
        let b = s
            .baseline("we like the red car", "we like the red car")
            .unwrap();
        assert_eq!(b.score, 1.0);
        assert_eq!(b.cosine_calls, 25);
    }

    #[test]
    fn orthogonal_tokens_score_zero() {
        let s = Scorer::new(Arc::new(Fixed), NormalizeOptions::default());
        let b = s.baseline("x", "y").unwrap();
        assert_eq!(b.score, 0.0);
        assert_eq!(b.cosine_calls, 1);
    }

    #[test]
    fn counts_every_pair() {
        let s = Scorer::from_config(&EmbedderConfig::mock(0)).unwrap();
        let gt: Vec<String> = (0..10).map(|i| format!("g{i}")).collect();
        let h: Vec<String> = (0..12).map(|i| format!("h{i}")).collect();
        let b = s.baseline(&gt.join(" "), &h.join(" ")).unwrap();
        assert_eq!(b.cosine_calls, 120);
        assert!((0.0..=1.0).contains(&b.score));
    }

    #[test]
    fn empty_sides() {
        let s = Scorer::from_config(&EmbedderConfig::mock(0)).unwrap();
        assert_eq!(s.baseline("", "").unwrap().score, 1.0);
        assert_eq!(s.baseline("a", "").unwrap().score, 0.0);
        assert_eq!(s.baseline("", "a").unwrap().cosine_calls, 0);
    }
}
