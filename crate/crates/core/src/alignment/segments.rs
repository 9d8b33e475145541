use serde::{Deserialize, Serialize};

use super::{CharAlignment, EditKind};
use crate::error::AlignmentError;
use crate::text_norm::{join_words, WordSpan};

/// A group of ground-truth words and the hypothesis words aligned to them.
/// At most one side is empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentPair {
    pub gt_words: Vec<WordSpan>,
    pub h_words: Vec<WordSpan>,
    pub gt_text: String,
    pub h_text: String,
}

impl SegmentPair {
    fn new(gt_words: Vec<WordSpan>, h_words: Vec<WordSpan>) -> Self {
        let gt_text = join_words(&gt_words);
        let h_text = join_words(&h_words);
        Self {
            gt_words,
            h_words,
            gt_text,
            h_text,
        }
    }

    /// Character range covered by the ground-truth side.
    pub fn gt_span(&self) -> Option<(usize, usize)> {
        span_of(&self.gt_words)
    }

    pub fn h_span(&self) -> Option<(usize, usize)> {
        span_of(&self.h_words)
    }
}

fn span_of(words: &[WordSpan]) -> Option<(usize, usize)> {
    Some((words.first()?.start, words.last()?.end))
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SegmentMapping {
    pub segments: Vec<SegmentPair>,
    /// Set when hypothesis words before the first linked word had to be
    /// attached forward to the first segment.
    pub leading_insertion: bool,
}

impl SegmentMapping {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller index as root so roots are stable.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Inclusive word-index ranges of one linked group.
#[derive(Debug, Clone, Copy)]
struct Group {
    gt: (usize, usize),
    h: (usize, usize),
}

fn overlaps(a: (usize, usize), b: (usize, usize)) -> bool {
    a.0 <= b.1 && b.0 <= a.1
}

fn char_to_word(
    words: &[WordSpan],
    len: usize,
    side: &'static str,
) -> Result<Vec<Option<usize>>, AlignmentError> {
    let mut map = vec![None; len];
    let mut prev_end = 0;
    for (w, span) in words.iter().enumerate() {
        if span.start >= span.end || span.end > len || (w > 0 && span.start <= prev_end) {
            return Err(AlignmentError::InconsistentWords {
                side,
                word: w,
                start: span.start,
                end: span.end,
                text_len: len,
            });
        }
        prev_end = span.end;
        for slot in &mut map[span.start..span.end] {
            *slot = Some(w);
        }
    }
    Ok(map)
}

/// Derives the segment mapping from word spans and a character alignment.
///
/// A ground-truth word and a hypothesis word are linked when a Match or
/// Substitute op pairs one of their characters; spaces never link. Linked
/// components become segments, widened to contiguous word ranges. Unlinked
/// ground-truth words become segments with an empty hypothesis side.
/// Unlinked hypothesis words join the nearest preceding segment, or the first
/// segment when nothing precedes them.
pub fn map_segments(
    gt_words: &[WordSpan],
    h_words: &[WordSpan],
    a: &CharAlignment,
) -> Result<SegmentMapping, AlignmentError> {
    let (gt_len, h_len) = (a.gt_len(), a.h_len());
    let gt_map = char_to_word(gt_words, gt_len, "ground truth")?;
    let h_map = char_to_word(h_words, h_len, "hypothesis")?;
    let (n, m) = (gt_words.len(), h_words.len());

    if n == 0 {
        let segments = if m == 0 {
            Vec::new()
        } else {
            vec![SegmentPair::new(Vec::new(), h_words.to_vec())]
        };
        return Ok(SegmentMapping {
            segments,
            leading_insertion: false,
        });
    }

    // Position of each character's op within the alignment.
    let mut gt_pos = vec![0usize; gt_len];
    let mut h_pos = vec![0usize; h_len];
    let mut links = DisjointSet::new(n + m);
    let mut linked = vec![false; n + m];
    for (p, op) in a.ops.iter().enumerate() {
        if let Some(g) = op.gt_index {
            gt_pos[g] = p;
        }
        if let Some(h) = op.h_index {
            h_pos[h] = p;
        }
        if matches!(op.kind, EditKind::Match | EditKind::Substitute) {
            let (g, h) = (op.gt_index.unwrap_or(0), op.h_index.unwrap_or(0));
            if let (Some(gw), Some(hw)) = (gt_map[g], h_map[h]) {
                links.union(gw, n + hw);
                linked[gw] = true;
                linked[n + hw] = true;
            }
        }
    }

    // Collect linked components as ranges; every component holds a GT word.
    let mut by_root: Vec<Option<Group>> = vec![None; n + m];
    for node in (0..n + m).filter(|&x| linked[x]) {
        let root = links.find(node);
        let (is_gt, idx) = if node < n {
            (true, node)
        } else {
            (false, node - n)
        };
        let g = by_root[root].get_or_insert(Group {
            gt: (usize::MAX, 0),
            h: (usize::MAX, 0),
        });
        let r = if is_gt { &mut g.gt } else { &mut g.h };
        r.0 = r.0.min(idx);
        r.1 = r.1.max(idx);
    }
    let mut groups: Vec<Group> = by_root.into_iter().flatten().collect();
    groups.sort_by_key(|g| g.gt.0);

    // Merge groups whose ranges overlap on either side until stable.
    loop {
        let mut merged = false;
        let mut out: Vec<Group> = Vec::with_capacity(groups.len());
        for g in groups {
            if let Some(prev) = out
                .iter_mut()
                .find(|p| overlaps(p.gt, g.gt) || overlaps(p.h, g.h))
            {
                prev.gt = (prev.gt.0.min(g.gt.0), prev.gt.1.max(g.gt.1));
                prev.h = (prev.h.0.min(g.h.0), prev.h.1.max(g.h.1));
                merged = true;
            } else {
                out.push(g);
            }
        }
        out.sort_by_key(|g| g.gt.0);
        groups = out;
        if !merged {
            break;
        }
    }

    // Walk GT words in order, emitting linked groups and GT-only segments.
    struct Draft {
        gt: (usize, usize),
        h: Vec<usize>,
    }
    let mut drafts: Vec<Draft> = Vec::new();
    let mut h_owner: Vec<Option<usize>> = vec![None; m];
    let mut gi = 0;
    let mut next_group = groups.iter().peekable();
    while gi < n {
        match next_group.peek() {
            Some(g) if g.gt.0 == gi => {
                let seg = drafts.len();
                for slot in &mut h_owner[g.h.0..=g.h.1] {
                    *slot = Some(seg);
                }
                drafts.push(Draft {
                    gt: g.gt,
                    h: (g.h.0..=g.h.1).collect(),
                });
                gi = g.gt.1 + 1;
                next_group.next();
            }
            _ => {
                drafts.push(Draft {
                    gt: (gi, gi),
                    h: Vec::new(),
                });
                gi += 1;
            }
        }
    }

    // Attach the remaining hypothesis words.
    let seg_start: Vec<usize> = drafts
        .iter()
        .map(|d| gt_pos[gt_words[d.gt.0].start])
        .collect();
    let mut leading_insertion = false;
    for hw in 0..m {
        if h_owner[hw].is_some() {
            continue;
        }
        let p = h_pos[h_words[hw].start];
        let host = match seg_start.iter().rposition(|&s| s < p) {
            Some(s) => s,
            None => {
                leading_insertion = true;
                0
            }
        };
        drafts[host].h.push(hw);
        h_owner[hw] = Some(host);
    }

    let mut segments = Vec::with_capacity(drafts.len());
    let mut expected_h = 0;
    for mut d in drafts {
        d.h.sort_unstable();
        for &hw in &d.h {
            if hw != expected_h {
                return Err(AlignmentError::NonContiguous { word: hw });
            }
            expected_h += 1;
        }
        segments.push(SegmentPair::new(
            gt_words[d.gt.0..=d.gt.1].to_vec(),
            d.h.iter().map(|&i| h_words[i].clone()).collect(),
        ));
    }
    Ok(SegmentMapping {
        segments,
        leading_insertion,
    })
}
