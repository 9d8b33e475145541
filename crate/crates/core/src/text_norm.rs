//! Transcript normalization and word tokenization.
//!
//! Every other module works on [`NormalizedText`]: lowercased (by default),
//! punctuation-stripped, single-space separated. All indices handed out from
//! here are indices into the text's Unicode scalar values, not bytes.

use serde::{Deserialize, Serialize};

/// Punctuation removed by default. Hyphens and apostrophes are deliberately
/// absent so that "well-being" and "don't" survive as single words.
pub const DEFAULT_PUNCTUATION: &str = ".,!?;:\"";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizeOptions {
    pub lowercase: bool,
    pub strip_punctuation: bool,
    pub punctuation: String,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        Self {
            lowercase: true,
            strip_punctuation: true,
            punctuation: DEFAULT_PUNCTUATION.to_string(),
        }
    }
}

/// A transcript in canonical form, together with the raw input it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedText {
    text: String,
    source: String,
}

impl NormalizedText {
    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    /// Length in characters.
    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }

    pub fn chars(&self) -> Vec<char> {
        self.text.chars().collect()
    }
}

impl std::fmt::Display for NormalizedText {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.text)
    }
}

/// One word of a [`NormalizedText`] with its character span `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordSpan {
    pub word: String,
    pub start: usize,
    pub end: usize,
}

impl WordSpan {
    pub fn char_len(&self) -> usize {
        self.end - self.start
    }
}

/// Normalizes with the default options.
pub fn normalize(raw: &str) -> NormalizedText {
    normalize_with(raw, &NormalizeOptions::default())
}

pub fn normalize_with(raw: &str, opts: &NormalizeOptions) -> NormalizedText {
    let mut text = String::with_capacity(raw.len());
    let mut pending_space = false;
    let mut push = |c: char, text: &mut String| {
        if c.is_whitespace() {
            pending_space = !text.is_empty();
            return;
        }
        if opts.strip_punctuation && opts.punctuation.contains(c) {
            return;
        }
        if pending_space {
            text.push(' ');
            pending_space = false;
        }
        text.push(c);
    };
    for c in raw.chars() {
        if opts.lowercase {
            for lc in c.to_lowercase() {
                push(lc, &mut text);
            }
        } else {
            push(c, &mut text);
        }
    }
    NormalizedText {
        text,
        source: raw.to_string(),
    }
}

/// Splits a normalized text on its single spaces.
pub fn tokenize_words(t: &NormalizedText) -> Vec<WordSpan> {
    let mut words = Vec::new();
    let mut current = String::new();
    let mut start = 0;
    let mut idx = 0;
    for c in t.text.chars() {
        if c == ' ' {
            if !current.is_empty() {
                words.push(WordSpan {
                    word: std::mem::take(&mut current),
                    start,
                    end: idx,
                });
            }
            start = idx + 1;
        } else {
            current.push(c);
        }
        idx += 1;
    }
    if !current.is_empty() {
        words.push(WordSpan {
            word: current,
            start,
            end: idx,
        });
    }
    words
}

/// Joins word spans with single spaces.
pub fn join_words(words: &[WordSpan]) -> String {
    let mut out = String::new();
    for (i, w) in words.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&w.word);
    }
    out
}
