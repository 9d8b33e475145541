use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::{Embedder, TokenEmbeddings, DEFAULT_MODEL_ID};
use crate::error::EmbeddingError;
use crate::text_norm::{tokenize_words, NormalizedText};

const SELF_WEIGHT: f64 = 0.8;
const CONTEXT_WEIGHT: f64 = 0.2;

/// Deterministic stand-in for a contextual encoder.
///
/// Each word gets a pseudorandom unit vector drawn from a generator seeded by
/// a hash of `(seed, word)`. A token's vector mixes its own word vector with
/// the mean of its immediate neighbours (0.8 / 0.2) and is renormalized, so
/// the same word in a different context gets a slightly different vector.
/// One token per word.
pub struct MockEmbedder {
    seed: u64,
    dim: usize,
    cache: Mutex<HashMap<String, Arc<Vec<f64>>>>,
}

impl MockEmbedder {
    pub fn new(seed: u64, dim: usize) -> Self {
        Self {
            seed,
            dim,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Unit-norm vector for a single word, independent of context.
    pub fn word_vector(&self, word: &str) -> Arc<Vec<f64>> {
        if let Some(v) = self.cache.lock().expect("cache poisoned").get(word) {
            return Arc::clone(v);
        }
        let v = Arc::new(draw_unit_vector(word_hash(self.seed, word), self.dim));
        self.cache
            .lock()
            .expect("cache poisoned")
            .insert(word.to_string(), Arc::clone(&v));
        v
    }
}

// FNV-1a, 64 bit. Stable across platforms and toolchains.
fn word_hash(seed: u64, word: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in seed.to_le_bytes().iter().chain(word.as_bytes()) {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn draw_unit_vector(seed: u64, dim: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..dim)
        .map(|_| {
            // 53 random bits mapped onto [-1, 1).
            let x = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            2.0 * x - 1.0
        })
        .collect();
    normalize(&mut v);
    v
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v {
            *x /= norm;
        }
    }
}

impl Embedder for MockEmbedder {
    fn embed_tokens(&self, text: &NormalizedText) -> Result<TokenEmbeddings, EmbeddingError> {
        let words = tokenize_words(text);
        if words.is_empty() {
            return Err(EmbeddingError::EmptyText);
        }
        let base: Vec<Arc<Vec<f64>>> = words.iter().map(|w| self.word_vector(&w.word)).collect();
        let mut vectors = Vec::with_capacity(words.len());
        for i in 0..words.len() {
            let neighbours: Vec<&Arc<Vec<f64>>> = [i.checked_sub(1), Some(i + 1)]
                .into_iter()
                .flatten()
                .filter_map(|j| base.get(j))
                .collect();
            let mut v: Vec<f64> = base[i].to_vec();
            if !neighbours.is_empty() {
                let k = neighbours.len() as f64;
                for (d, x) in v.iter_mut().enumerate() {
                    let ctx: f64 = neighbours.iter().map(|n| n[d]).sum::<f64>() / k;
                    *x = SELF_WEIGHT * *x + CONTEXT_WEIGHT * ctx;
                }
                normalize(&mut v);
            }
            vectors.push(v);
        }
        let offsets = words.iter().map(|w| (w.start, w.end)).collect();
        TokenEmbeddings::new(vectors, offsets, self.dim)
    }

    fn model_id(&self) -> &str {
        DEFAULT_MODEL_ID
    }
}
