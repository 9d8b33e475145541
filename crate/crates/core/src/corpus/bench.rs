use std::time::Instant;

use serde::Serialize;

use super::stats::{mean, median};
use super::CorpusRecord;
use crate::error::{CorpusError, Error, Result};
use crate::scoring::Scorer;
use crate::text_norm::tokenize_words;

pub const MIN_BENCH_RECORDS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchOptions {
    /// Timed repetitions per record; each record's time is the median.
    pub repeats: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self { repeats: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricTiming {
    pub metric: String,
    pub mean_secs: f64,
    pub median_secs: f64,
    pub total_cosine_calls: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordCalls {
    pub id: String,
    pub gt_words: usize,
    pub h_words: usize,
    pub segments: usize,
    pub semascore_calls: usize,
    pub baseline_calls: usize,
    /// Baseline calls over segment-metric calls; `None` when the latter is 0.
    pub call_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingTable {
    pub records: usize,
    pub repeats: usize,
    /// Embedding time, reported separately and excluded from every metric.
    pub embedding: MetricTiming,
    pub metrics: Vec<MetricTiming>,
    pub per_record: Vec<RecordCalls>,
    pub mean_call_ratio: Option<f64>,
    /// Mean baseline time over mean segment-metric time.
    pub wall_time_ratio: f64,
}

impl TimingTable {
    pub fn metric(&self, name: &str) -> Option<&MetricTiming> {
        self.metrics.iter().find(|m| m.metric == name)
    }
}

fn timing(metric: &str, per_record: &[f64], calls: usize) -> MetricTiming {
    MetricTiming {
        metric: metric.to_string(),
        mean_secs: mean(per_record),
        median_secs: median(per_record),
        total_cosine_calls: calls,
    }
}

/// Times the segment metric, the greedy baseline and WER on every record,
/// single-threaded. Embedding happens once per record, outside the timed
/// sections.
pub fn benchmark(
    records: &[CorpusRecord],
    scorer: &Scorer,
    opts: &BenchOptions,
) -> Result<TimingTable> {
    if records.len() < MIN_BENCH_RECORDS {
        return Err(CorpusError::TooFewRecords {
            needed: MIN_BENCH_RECORDS,
            got: records.len(),
        }
        .into());
    }
    let repeats = opts.repeats.max(1);
    let with_id = |rec: &CorpusRecord, e: Error| {
        Error::from(CorpusError::Record {
            id: rec.id.clone(),
            source: Box::new(e),
        })
    };

    let mut embed_t = Vec::with_capacity(records.len());
    let mut sema_t = Vec::with_capacity(records.len());
    let mut base_t = Vec::with_capacity(records.len());
    let mut wer_t = Vec::with_capacity(records.len());
    let mut per_record = Vec::with_capacity(records.len());

    for rec in records {
        let t = Instant::now();
        let prepared = scorer
            .prepare(&rec.gt, &rec.h)
            .map_err(|e| with_id(rec, e))?;
        embed_t.push(t.elapsed().as_secs_f64());

        let gt_words = tokenize_words(&prepared.gt);
        let h_words = tokenize_words(&prepared.h);
        let gt_tokens: Vec<&str> = gt_words.iter().map(|w| w.word.as_str()).collect();
        let h_tokens: Vec<&str> = h_words.iter().map(|w| w.word.as_str()).collect();

        let (mut s, mut b, mut w) = (Vec::new(), Vec::new(), Vec::new());
        let mut last = None;
        for _ in 0..repeats {
            let t = Instant::now();
            let report = scorer
                .score_prepared(&prepared)
                .map_err(|e| with_id(rec, e))?;
            s.push(t.elapsed().as_secs_f64());

            let t = Instant::now();
            let baseline = scorer
                .baseline_prepared(&prepared)
                .map_err(|e| with_id(rec, e))?;
            b.push(t.elapsed().as_secs_f64());

            let t = Instant::now();
            let _ = std::hint::black_box(crate::error_metrics::wer(&gt_tokens, &h_tokens));
            w.push(t.elapsed().as_secs_f64());
            last = Some((report, baseline));
        }
        sema_t.push(median(&s));
        base_t.push(median(&b));
        wer_t.push(median(&w));

        let (report, baseline) = last.expect("at least one repeat");
        per_record.push(RecordCalls {
            id: rec.id.clone(),
            gt_words: gt_words.len(),
            h_words: h_words.len(),
            segments: report.segments.len(),
            semascore_calls: report.cosine_calls,
            baseline_calls: baseline.cosine_calls,
            call_ratio: (report.cosine_calls > 0)
                .then(|| baseline.cosine_calls as f64 / report.cosine_calls as f64),
        });
    }

    let ratios: Vec<f64> = per_record.iter().filter_map(|r| r.call_ratio).collect();
    let sema = timing(
        "semascore",
        &sema_t,
        per_record.iter().map(|r| r.semascore_calls).sum(),
    );
    let base = timing(
        "baseline",
        &base_t,
        per_record.iter().map(|r| r.baseline_calls).sum(),
    );
    let wall_time_ratio = base.mean_secs / sema.mean_secs;
    Ok(TimingTable {
        records: records.len(),
        repeats,
        embedding: timing("embedding", &embed_t, 0),
        metrics: vec![sema, base, timing("wer", &wer_t, 0)],
        per_record,
        mean_call_ratio: (!ratios.is_empty()).then(|| mean(&ratios)),
        wall_time_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::synthetic::square_pairs;
    use crate::embedding::EmbedderConfig;

    fn scorer() -> Scorer {
        Scorer::from_config(&EmbedderConfig::mock(0)).unwrap()
    }

    #[test]
    fn ten_word_pairs() {
        let recs = square_pairs(10, 10, 1);
        let t = benchmark(&recs, &scorer(), &BenchOptions { repeats: 1 }).unwrap();
        for r in &t.per_record {
            assert_eq!(r.baseline_calls, 100);
            assert!(r.semascore_calls <= 20);
            assert_eq!(r.semascore_calls, 2 * r.segments);
        }
    }

    #[test]
    fn call_counts_are_deterministic() {
        let recs = square_pairs(12, 15, 9);
        let a = benchmark(&recs, &scorer(), &BenchOptions { repeats: 1 }).unwrap();
        let b = benchmark(&recs, &scorer(), &BenchOptions { repeats: 1 }).unwrap();
        assert_eq!(a.per_record, b.per_record);
        assert_eq!(
            a.metric("semascore").unwrap().total_cosine_calls,
            b.metric("semascore").unwrap().total_cosine_calls
        );
    }

    #[test]
    fn too_few_records() {
        let recs = square_pairs(3, 5, 0);
        assert!(matches!(
            benchmark(&recs, &scorer(), &BenchOptions::default()),
            Err(Error::Corpus(CorpusError::TooFewRecords {
                needed: 10,
                got: 3
            }))
        ));
    }
}
