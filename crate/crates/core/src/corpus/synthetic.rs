//! Seeded synthetic corpora for benchmarks and sanity checks.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::CorpusRecord;

pub const VOCABULARY: &[&str] = &[
    "the",
    "a",
    "i",
    "you",
    "we",
    "they",
    "want",
    "need",
    "have",
    "like",
    "see",
    "go",
    "come",
    "take",
    "make",
    "give",
    "find",
    "call",
    "book",
    "flight",
    "ticket",
    "train",
    "bus",
    "city",
    "morning",
    "evening",
    "night",
    "today",
    "tomorrow",
    "monday",
    "friday",
    "weekend",
    "please",
    "thank",
    "sorry",
    "hello",
    "doctor",
    "nurse",
    "medicine",
    "pain",
    "head",
    "hand",
    "water",
    "coffee",
    "tea",
    "sandwich",
    "bread",
    "soup",
    "dinner",
    "lunch",
    "breakfast",
    "table",
    "chair",
    "window",
    "door",
    "house",
    "garden",
    "street",
    "station",
    "airport",
    "hotel",
    "room",
    "key",
    "phone",
    "message",
    "letter",
    "music",
    "song",
    "movie",
    "game",
    "team",
    "school",
    "teacher",
    "student",
    "lesson",
    "story",
    "paper",
    "pencil",
    "computer",
    "screen",
    "light",
    "dark",
    "warm",
    "cold",
    "quick",
    "slow",
    "early",
    "late",
    "small",
    "large",
    "happy",
    "tired",
    "hungry",
    "open",
    "close",
    "start",
    "stop",
    "turn",
    "left",
    "right",
    "up",
    "down",
    "near",
    "far",
    "with",
    "without",
    "from",
    "to",
    "into",
    "under",
    "over",
    "after",
    "before",
    "because",
    "while",
    "red",
    "blue",
    "green",
    "yellow",
    "black",
    "white",
    "one",
    "two",
    "three",
    "four",
    "five",
    "seven",
    "ten",
    "hundred",
    "mother",
    "father",
    "sister",
    "brother",
    "friend",
    "neighbor",
    "dog",
    "cat",
    "bird",
    "river",
    "mountain",
    "forest",
    "weather",
    "rain",
    "snow",
    "sun",
];

/// Tiny seeded RNG helpers on top of ChaCha8.
struct Rng(ChaCha8Rng);

impl Rng {
    fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn word(&mut self) -> &'static str {
        VOCABULARY[self.below(VOCABULARY.len())]
    }

    fn other_word(&mut self, not: &str) -> &'static str {
        loop {
            let w = self.word();
            if w != not {
                return w;
            }
        }
    }
}

fn typo(rng: &mut Rng, word: &str) -> String {
    let mut chars: Vec<char> = word.chars().collect();
    let pos = rng.below(chars.len());
    let original = chars[pos];
    loop {
        let c = (b'a' + rng.below(26) as u8) as char;
        if c != original {
            chars[pos] = c;
            break;
        }
    }
    chars.into_iter().collect()
}

fn sentence(rng: &mut Rng, words: usize) -> Vec<String> {
    (0..words).map(|_| rng.word().to_string()).collect()
}

/// Corrupts each word with probability `rate` by substitution, deletion,
/// insertion of a random word, or a one-letter typo.
pub fn corrupt_words(seed: u64, words: &[String], rate: f64) -> Vec<String> {
    let mut rng = Rng::new(seed);
    let mut out = Vec::with_capacity(words.len() + 4);
    for w in words {
        if rng.unit() >= rate {
            out.push(w.clone());
            continue;
        }
        match rng.below(4) {
            0 => out.push(rng.other_word(w).to_string()),
            1 => {}
            2 => {
                out.push(w.clone());
                out.push(rng.word().to_string());
            }
            _ => out.push(typo(&mut rng, w)),
        }
    }
    out
}

/// `sentences` random reference sentences, each paired with one hypothesis
/// per severity level. Record ids are `s{sentence}-l{level}` and the group is
/// the level index.
pub fn corruption_ladder(sentences: usize, severities: &[f64], seed: u64) -> Vec<CorpusRecord> {
    let mut rng = Rng::new(seed);
    let mut out = Vec::with_capacity(sentences * severities.len());
    for s in 0..sentences {
        let len = 8 + rng.below(8);
        let gt = sentence(&mut rng, len);
        for (level, &rate) in severities.iter().enumerate() {
            let h = corrupt_words(rng.0.next_u64(), &gt, rate);
            out.push(CorpusRecord {
                id: format!("s{s}-l{level}"),
                gt: gt.join(" "),
                h: h.join(" "),
                group: Some(level.to_string()),
            });
        }
    }
    out
}

/// Pairs with exactly `words` words on both sides. About one word in ten is
/// substituted or misspelled; nothing is inserted or deleted.
pub fn square_pairs(pairs: usize, words: usize, seed: u64) -> Vec<CorpusRecord> {
    let mut rng = Rng::new(seed);
    (0..pairs)
        .map(|i| {
            let gt = sentence(&mut rng, words);
            let h: Vec<String> = gt
                .iter()
                .map(|w| {
                    if rng.unit() >= 0.1 {
                        w.clone()
                    } else if rng.below(2) == 0 {
                        rng.other_word(w).to_string()
                    } else {
                        typo(&mut rng, w)
                    }
                })
                .collect();
            CorpusRecord {
                id: format!("n{words}-{i}"),
                gt: gt.join(" "),
                h: h.join(" "),
                group: Some(words.to_string()),
            }
        })
        .collect()
}
