//! Error rates: WER, CER and the bounded match error rate (MER).
//!
//! All counts come from the same deterministic alignment used for segment
//! mapping, so the tallies are reproducible across runs.

use serde::{Deserialize, Serialize};

use crate::alignment::{align_sequences, CharAlignment, EditKind};
use crate::error::MetricError;

/// Hit / substitution / deletion / insertion tallies of one alignment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditCounts {
    pub hits: usize,
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
}

impl EditCounts {
    pub fn from_alignment(a: &CharAlignment) -> Self {
        let mut c = Self::default();
        for op in &a.ops {
            match op.kind {
                EditKind::Match => c.hits += 1,
                EditKind::Substitute => c.substitutions += 1,
                EditKind::Delete => c.deletions += 1,
                EditKind::Insert => c.insertions += 1,
            }
        }
        c
    }

    pub fn errors(&self) -> usize {
        self.substitutions + self.deletions + self.insertions
    }

    pub fn reference_len(&self) -> usize {
        self.hits + self.substitutions + self.deletions
    }

    pub fn hypothesis_len(&self) -> usize {
        self.hits + self.substitutions + self.insertions
    }

    /// (S+D+I)/(H+S+D+I); zero when nothing was aligned at all.
    pub fn match_error_rate(&self) -> f64 {
        let total = self.errors() + self.hits;
        if total == 0 {
            0.0
        } else {
            self.errors() as f64 / total as f64
        }
    }
}

/// Character-level edit counts.
pub fn edit_counts(reference: &str, hypothesis: &str) -> EditCounts {
    let r: Vec<char> = reference.chars().collect();
    let h: Vec<char> = hypothesis.chars().collect();
    EditCounts::from_alignment(&align_sequences(&r, &h))
}

/// Character-level match error rate, always in `[0, 1]`.
pub fn mer(reference: &str, hypothesis: &str) -> f64 {
    edit_counts(reference, hypothesis).match_error_rate()
}

fn word_counts<S: AsRef<str>>(reference: &[S], hypothesis: &[S]) -> EditCounts {
    let r: Vec<&str> = reference.iter().map(AsRef::as_ref).collect();
    let h: Vec<&str> = hypothesis.iter().map(AsRef::as_ref).collect();
    EditCounts::from_alignment(&align_sequences(&r, &h))
}

/// Word error rate. Can exceed 1 when the hypothesis has many insertions.
pub fn wer<S: AsRef<str>>(gt_words: &[S], h_words: &[S]) -> Result<f64, MetricError> {
    if gt_words.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    Ok(word_counts(gt_words, h_words).errors() as f64 / gt_words.len() as f64)
}

/// Word-level match error rate. Only used for corpus reports.
pub fn word_mer<S: AsRef<str>>(gt_words: &[S], h_words: &[S]) -> f64 {
    word_counts(gt_words, h_words).match_error_rate()
}

/// Character error rate over the normalized strings, spaces included.
pub fn cer(gt: &str, h: &str) -> Result<f64, MetricError> {
    let counts = edit_counts(gt, h);
    if counts.reference_len() == 0 {
        return Err(MetricError::EmptyReference);
    }
    Ok(counts.errors() as f64 / counts.reference_len() as f64)
}
