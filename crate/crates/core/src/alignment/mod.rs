//! Character-level edit-distance alignment and segment mapping.
//!
//! The alignment is a unit-cost Levenshtein alignment. Among the minimum-cost
//! alignments one is picked by a fixed backtrace preference (diagonal, then
//! deletion, then insertion), so the result never depends on platform or run.

mod segments;

pub use segments::{map_segments, SegmentMapping, SegmentPair};

use serde::{Deserialize, Serialize};

use crate::text_norm::NormalizedText;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditKind {
    Match,
    Substitute,
    /// A hypothesis character with no ground-truth counterpart.
    Insert,
    /// A ground-truth character missing from the hypothesis.
    Delete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditOp {
    pub kind: EditKind,
    pub gt_index: Option<usize>,
    pub h_index: Option<usize>,
}

impl EditOp {
    fn diagonal(kind: EditKind, gt: usize, h: usize) -> Self {
        Self {
            kind,
            gt_index: Some(gt),
            h_index: Some(h),
        }
    }

    fn delete(gt: usize) -> Self {
        Self {
            kind: EditKind::Delete,
            gt_index: Some(gt),
            h_index: None,
        }
    }

    fn insert(h: usize) -> Self {
        Self {
            kind: EditKind::Insert,
            gt_index: None,
            h_index: Some(h),
        }
    }
}

/// An ordered list of edit operations turning the ground truth into the
/// hypothesis. Indices are element indices of the aligned sequences (Unicode
/// scalar values for [`char_align`]).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharAlignment {
    pub ops: Vec<EditOp>,
    pub distance: usize,
}

impl CharAlignment {
    pub fn gt_len(&self) -> usize {
        self.ops.iter().filter(|op| op.gt_index.is_some()).count()
    }

    pub fn h_len(&self) -> usize {
        self.ops.iter().filter(|op| op.h_index.is_some()).count()
    }

    pub fn count(&self, kind: EditKind) -> usize {
        self.ops.iter().filter(|op| op.kind == kind).count()
    }
}

/// Aligns two normalized texts character by character.
pub fn char_align(gt: &NormalizedText, h: &NormalizedText) -> CharAlignment {
    align_sequences(&gt.chars(), &h.chars())
}

pub fn align_str(gt: &str, h: &str) -> CharAlignment {
    let gt: Vec<char> = gt.chars().collect();
    let h: Vec<char> = h.chars().collect();
    align_sequences(&gt, &h)
}

const INF: u32 = u32::MAX / 2;

/// Dynamic-programming table restricted to the diagonals `q = j - i` that a
/// path of cost at most `k` can visit: `|q| + |(m - n) - q| <= k`. Each row
/// stores those cells plus one INF sentinel on each side, so the fill loop
/// needs no bounds branches.
struct Band {
    /// Lowest diagonal in the band.
    qlo: isize,
    width: usize,
    cells: Vec<u32>,
}

impl Band {
    fn new(n: usize, m: usize, k: usize) -> Self {
        let delta = m as isize - n as isize;
        let slack = (k as isize - delta.abs()) / 2;
        let (qlo, qhi) = (delta.min(0) - slack, delta.max(0) + slack);
        let width = (qhi - qlo) as usize + 3;
        Self {
            qlo,
            width,
            cells: vec![INF; (n + 1) * width],
        }
    }

    /// Storage slot of column `j` in row `i`, relative to the row start.
    #[inline]
    fn slot(&self, i: usize, j: usize) -> isize {
        j as isize - i as isize - self.qlo + 1
    }

    fn get(&self, i: usize, j: usize) -> u32 {
        let s = self.slot(i, j);
        if s < 0 || s as usize >= self.width {
            INF
        } else {
            self.cells[i * self.width + s as usize]
        }
    }
}

fn fill_band<T: PartialEq>(a: &[T], b: &[T], k: usize) -> Band {
    let (n, m) = (a.len(), b.len());
    let mut band = Band::new(n, m, k);
    let w = band.width;
    let last = w as isize - 2;
    for j in 0..=m {
        let s = band.slot(0, j);
        if s > last {
            break;
        }
        if s >= 1 {
            band.cells[s as usize] = j as u32;
        }
    }
    for i in 1..=n {
        let s0 = band.slot(i, 0);
        let (prev, cur) = band.cells[(i - 1) * w..(i + 1) * w].split_at_mut(w);
        if (1..=last).contains(&s0) {
            cur[s0 as usize] = i as u32;
        }
        let s_lo = (s0 + 1).max(1);
        let s_hi = (s0 + m as isize).min(last);
        if s_lo > s_hi {
            continue;
        }
        let ai = &a[i - 1];
        // Column of slot `s` is `s - s0`.
        for s in s_lo as usize..=s_hi as usize {
            let j = (s as isize - s0) as usize;
            let cost = u32::from(*ai != b[j - 1]);
            let diag = prev[s] + cost;
            let up = prev[s + 1] + 1;
            let left = cur[s - 1] + 1;
            cur[s] = diag.min(up).min(left);
        }
    }
    band
}

/// Minimum-cost unit-cost alignment of two arbitrary sequences.
///
/// Runs a banded DP and doubles the band until the distance fits inside it.
/// Every cell on a path of cost at most `k` lies inside the band and is
/// computed exactly, so the backtrace (which only follows optimal paths)
/// makes the same choices a full-table DP would.
pub fn align_sequences<T: PartialEq>(gt: &[T], h: &[T]) -> CharAlignment {
    let (n, m) = (gt.len(), h.len());
    let full = n.max(m);
    let mut k = n.abs_diff(m).max(16).min(full);
    let band = loop {
        let band = fill_band(gt, h, k);
        let d = band.get(n, m) as usize;
        if d <= k || k >= full {
            break band;
        }
        k = (k * 2).min(full);
    };

    let distance = band.get(n, m) as usize;
    let mut ops = Vec::with_capacity(n.max(m) + distance);
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let cur = band.get(i, j);
        if i > 0 && j > 0 {
            let diag = band.get(i - 1, j - 1);
            if gt[i - 1] == h[j - 1] {
                if diag == cur {
                    ops.push(EditOp::diagonal(EditKind::Match, i - 1, j - 1));
                    i -= 1;
                    j -= 1;
                    continue;
                }
            } else if diag + 1 == cur {
                ops.push(EditOp::diagonal(EditKind::Substitute, i - 1, j - 1));
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && band.get(i - 1, j) + 1 == cur {
            ops.push(EditOp::delete(i - 1));
            i -= 1;
        } else {
            ops.push(EditOp::insert(j - 1));
            j -= 1;
        }
    }
    ops.reverse();
    CharAlignment { ops, distance }
}
