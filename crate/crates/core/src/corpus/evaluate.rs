use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::stats::{correlations, mean, sample_std, Correlation};
use super::CorpusRecord;
use crate::error::{CorpusError, Error, MetricError, Result};
use crate::scoring::{ScoreReport, Scorer};

/// Metric names, in report order.
pub const METRICS: [&str; 5] = ["semascore", "wer", "cer", "mer", "baseline"];

#[derive(Debug, Clone, Serialize)]
pub struct RecordResult {
    pub id: String,
    pub group: Option<String>,
    pub semascore: f64,
    pub wer: f64,
    pub cer: f64,
    /// Character-level match error rate of the whole pair.
    pub mer: f64,
    /// Word-level match error rate, reported for reference only.
    pub word_mer: f64,
    pub baseline: f64,
    pub cosine_calls: usize,
    pub baseline_cosine_calls: usize,
    pub report: ScoreReport,
    #[serde(skip)]
    timing: (f64, f64),
}

impl RecordResult {
    pub fn metric(&self, name: &str) -> Option<f64> {
        match name {
            "semascore" => Some(self.semascore),
            "wer" => Some(self.wer),
            "cer" => Some(self.cer),
            "mer" => Some(self.mer),
            "baseline" => Some(self.baseline),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricStats {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupStats {
    pub group: String,
    pub count: usize,
    pub metrics: BTreeMap<String, MetricStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricCorrelation {
    pub x: String,
    pub y: String,
    #[serde(flatten)]
    pub value: Correlation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingSummary {
    pub semascore_cosine_calls: usize,
    pub baseline_cosine_calls: usize,
    /// Mean metric wall time per record, excluding embedding. Only present
    /// when timing was requested, since it varies run to run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub semascore_mean_secs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline_mean_secs: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusReport {
    pub records: usize,
    pub per_record: Vec<RecordResult>,
    pub overall: Option<GroupStats>,
    /// Only groups with at least two records.
    pub per_group: Vec<GroupStats>,
    pub correlations: Vec<MetricCorrelation>,
    pub timing: TimingSummary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    pub workers: usize,
    pub timing: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            workers: 1,
            timing: false,
        }
    }
}

fn evaluate_record(scorer: &Scorer, rec: &CorpusRecord) -> Result<RecordResult> {
    let prepared = scorer.prepare(&rec.gt, &rec.h)?;
    let t0 = Instant::now();
    let report = scorer.score_prepared(&prepared)?;
    let t1 = Instant::now();
    let baseline = scorer.baseline_prepared(&prepared)?;
    let t2 = Instant::now();

    let wer = report.wer.ok_or(MetricError::EmptyReference)?;
    let cer = report.cer.ok_or(MetricError::EmptyReference)?;
    let gt: Vec<&str> = prepared.gt.as_str().split_whitespace().collect();
    let h: Vec<&str> = prepared.h.as_str().split_whitespace().collect();
    Ok(RecordResult {
        id: rec.id.clone(),
        group: rec.group.clone(),
        semascore: report.semascore,
        wer,
        cer,
        mer: report.sentence_mer,
        word_mer: crate::error_metrics::word_mer(&gt, &h),
        baseline: baseline.score,
        cosine_calls: report.cosine_calls,
        baseline_cosine_calls: baseline.cosine_calls,
        report,
        timing: ((t1 - t0).as_secs_f64(), (t2 - t1).as_secs_f64()),
    })
}

fn group_stats(group: &str, rows: &[&RecordResult]) -> GroupStats {
    let metrics = METRICS
        .iter()
        .map(|&m| {
            let xs: Vec<f64> = rows.iter().filter_map(|r| r.metric(m)).collect();
            (
                m.to_string(),
                MetricStats {
                    mean: mean(&xs),
                    std: sample_std(&xs),
                },
            )
        })
        .collect();
    GroupStats {
        group: group.to_string(),
        count: rows.len(),
        metrics,
    }
}

/// Scores every record with the segment metric, WER/CER/MER and the greedy
/// baseline, then aggregates per group and correlates every metric pair.
///
/// Records are processed on `opts.workers` threads; the output keeps input
/// order. The first failing record aborts the run.
pub fn evaluate_corpus(
    records: &[CorpusRecord],
    scorer: &Scorer,
    opts: &EvalOptions,
) -> Result<CorpusReport> {
    if records.is_empty() {
        return Err(CorpusError::Empty.into());
    }
    let eval = |rec: &CorpusRecord| {
        evaluate_record(scorer, rec).map_err(|e| {
            Error::from(CorpusError::Record {
                id: rec.id.clone(),
                source: Box::new(e),
            })
        })
    };
    let per_record = if opts.workers <= 1 {
        records.iter().map(eval).collect::<Result<Vec<_>>>()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| CorpusError::Workers(e.to_string()))?
            .install(|| records.par_iter().map(eval).collect::<Result<Vec<_>>>())?
    };

    let all: Vec<&RecordResult> = per_record.iter().collect();
    let overall = (all.len() >= 2).then(|| group_stats("all", &all));

    let mut groups: BTreeMap<&str, Vec<&RecordResult>> = BTreeMap::new();
    for r in &per_record {
        if let Some(g) = &r.group {
            groups.entry(g.as_str()).or_default().push(r);
        }
    }
    let per_group = groups
        .iter()
        .filter(|(_, rows)| rows.len() >= 2)
        .map(|(g, rows)| group_stats(g, rows))
        .collect();

    let mut corr = Vec::new();
    if per_record.len() >= 2 {
        for (i, x) in METRICS.iter().enumerate() {
            for y in &METRICS[i + 1..] {
                let xs: Vec<f64> = per_record.iter().filter_map(|r| r.metric(x)).collect();
                let ys: Vec<f64> = per_record.iter().filter_map(|r| r.metric(y)).collect();
                corr.push(MetricCorrelation {
                    x: x.to_string(),
                    y: y.to_string(),
                    value: correlations(&xs, &ys)?,
                });
            }
        }
    }

    let n = per_record.len() as f64;
    let timing = TimingSummary {
        semascore_cosine_calls: per_record.iter().map(|r| r.cosine_calls).sum(),
        baseline_cosine_calls: per_record.iter().map(|r| r.baseline_cosine_calls).sum(),
        semascore_mean_secs: opts
            .timing
            .then(|| per_record.iter().map(|r| r.timing.0).sum::<f64>() / n),
        baseline_mean_secs: opts
            .timing
            .then(|| per_record.iter().map(|r| r.timing.1).sum::<f64>() / n),
    };

    Ok(CorpusReport {
        records: per_record.len(),
        per_record,
        overall,
        per_group,
        correlations: corr,
        timing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::EmbedderConfig;

    fn rec(id: &str, gt: &str, h: &str, group: Option<&str>) -> CorpusRecord {
        CorpusRecord {
            id: id.into(),
            gt: gt.into(),
            h: h.into(),
            group: group.map(Into::into),
        }
    }

    fn scorer() -> Scorer {
        Scorer::from_config(&EmbedderConfig::mock(0)).unwrap()
    }

    #[test]
    fn identical_pairs_group() {
        let recs = vec![
            rec("a", "the cat sat", "the cat sat", Some("0")),
            rec("b", "on the mat", "on the mat", Some("0")),
        ];
        let r = evaluate_corpus(&recs, &scorer(), &EvalOptions::default()).unwrap();
        let g = &r.per_group[0];
        assert_eq!(
            g.metrics["semascore"],
            MetricStats {
                mean: 1.0,
                std: 0.0
            }
        );
        assert_eq!(r.timing.semascore_mean_secs, None);
    }

    #[test]
    fn boundary_groups() {
        let recs = vec![
            rec("1", "good morning", "good morning", Some("perfect")),
            rec("2", "see you soon", "see you soon", Some("perfect")),
            rec("3", "good morning", "", Some("empty")),
            rec("4", "see you soon", "", Some("empty")),
            rec("5", "lonely", "lonely", Some("single")),
        ];
        let r = evaluate_corpus(&recs, &scorer(), &EvalOptions::default()).unwrap();
        let names: Vec<&str> = r.per_group.iter().map(|g| g.group.as_str()).collect();
        assert_eq!(names, ["empty", "perfect"]);
        assert_eq!(r.per_group[0].metrics["semascore"].mean, 0.0);
        assert_eq!(r.per_group[1].metrics["semascore"].mean, 1.0);
        assert_eq!(r.correlations.len(), 10);
    }

    #[test]
    fn empty_reference_aborts_with_id() {
        let recs = vec![rec("ok", "a", "a", None), rec("bad", "", "a", None)];
        let err = evaluate_corpus(&recs, &scorer(), &EvalOptions::default()).unwrap_err();
        assert!(err.to_string().contains("\"bad\""), "{err}");
        assert!(!err.is_backend());
    }

    #[test]
    fn parallel_matches_serial() {
        let recs: Vec<CorpusRecord> = (0..20)
            .map(|i| {
                rec(
                    &format!("r{i}"),
                    "we want a warm sandwich",
                    &format!("we vant a sandwich {i}"),
                    None,
                )
            })
            .collect();
        let s = scorer();
        let serial = evaluate_corpus(&recs, &s, &EvalOptions::default()).unwrap();
        let parallel = evaluate_corpus(
            &recs,
            &s,
            &EvalOptions {
                workers: 4,
                timing: true,
            },
        )
        .unwrap();
        let ids: Vec<&str> = parallel.per_record.iter().map(|r| r.id.as_str()).collect();
        let expect: Vec<String> = (0..20).map(|i| format!("r{i}")).collect();
        assert_eq!(ids, expect);
        for (a, b) in serial.per_record.iter().zip(&parallel.per_record) {
            assert_eq!(a.semascore.to_bits(), b.semascore.to_bits());
        }
        assert!(parallel.timing.semascore_mean_secs.is_some());
    }

    #[test]
    fn empty_corpus_rejected() {
        assert!(evaluate_corpus(&[], &scorer(), &EvalOptions::default()).is_err());
    }
}
