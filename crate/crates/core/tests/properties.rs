use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use semascore::corpus::synthetic::{corruption_ladder, square_pairs};
use semascore::{
    benchmark, correlations, evaluate_corpus, mer, BenchOptions, Coefficient, EmbedderConfig,
    EvalOptions, Scorer,
};

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Textbook two-pass Pearson.
fn oracle_pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

/// Quadratic-time ranks: 1 + #smaller + (#equal - 1) / 2.
fn oracle_ranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            let less = x.iter().filter(|&&w| w < v).count() as f64;
            let equal = x.iter().filter(|&&w| w == v).count() as f64;
            1.0 + less + (equal - 1.0) / 2.0
        })
        .collect()
}

fn close(got: Coefficient, want: Option<f64>, tol: f64) -> bool {
    match (got.value(), want) {
        (Some(g), Some(w)) => (g - w).abs() <= tol,
        (None, None) => true,
        _ => false,
    }
}

#[test]
fn correlations_match_direct_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for series in 0..100 {
        let n = 3 + (rng.next_u64() % 60) as usize;
        let mut x: Vec<f64> = (0..n).map(|_| unit(&mut rng)).collect();
        let mut y: Vec<f64> = x.iter().map(|v| v * 0.5 + unit(&mut rng)).collect();
        // Every third series gets heavy ties.
        if series % 3 == 0 {
            x.iter_mut().for_each(|v| *v = (*v * 4.0).floor());
            y.iter_mut().for_each(|v| *v = (*v * 3.0).floor());
        }
        let got = correlations(&x, &y).unwrap();
        let pearson = oracle_pearson(&x, &y);
        let spearman = oracle_pearson(&oracle_ranks(&x), &oracle_ranks(&y));
        assert!(
            close(got.pearson, pearson, 1e-9),
            "series {series}: {:?} vs {pearson:?}",
            got.pearson
        );
        assert!(
            close(got.spearman, spearman, 1e-9),
            "series {series}: {:?} vs {spearman:?}",
            got.spearman
        );
    }
}

#[test]
fn constant_series_is_undefined_not_zero() {
    let got = correlations(&[1.0, 1.0, 1.0], &[0.1, 0.5, 0.9]).unwrap();
    assert_eq!(got.pearson, Coefficient::Undefined);
    assert_eq!(got.spearman, Coefficient::Undefined);
    assert_eq!(serde_json::to_value(got.pearson).unwrap(), "undefined");
}

#[test]
fn group_means_are_arithmetic_means() {
    let records = corruption_ladder(30, &[0.0, 0.2, 0.5], 5);
    let scorer = Scorer::from_config(&EmbedderConfig::mock(3)).unwrap();
    let report = evaluate_corpus(
        &records,
        &scorer,
        &EvalOptions {
            workers: 3,
            timing: false,
        },
    )
    .unwrap();

    let mut by_group: BTreeMap<String, Vec<&semascore::corpus::RecordResult>> = BTreeMap::new();
    for r in &report.per_record {
        by_group
            .entry(r.group.clone().unwrap())
            .or_default()
            .push(r);
    }
    assert_eq!(report.per_group.len(), by_group.len());
    for g in &report.per_group {
        let rows = &by_group[&g.group];
        assert_eq!(g.count, rows.len());
        for (metric, stats) in &g.metrics {
            let values: Vec<f64> = rows.iter().map(|r| r.metric(metric).unwrap()).collect();
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            assert!(
                (stats.mean - mean).abs() <= 1e-12,
                "{} {metric}: {} vs {mean}",
                g.group,
                stats.mean
            );
        }
    }
}

#[test]
fn semascore_calls_are_twice_the_segment_count() {
    let scorer = Scorer::from_config(&EmbedderConfig::mock(0)).unwrap();
    for rec in corruption_ladder(40, &[0.0, 0.3, 0.8], 9) {
        let report = scorer.score(&rec.gt, &rec.h).unwrap();
        let gt_words = rec.gt.split_whitespace().count();
        let h_words = rec.h.split_whitespace().count();
        let segments = report.segments.len();
        assert_eq!(report.cosine_calls, 2 * segments, "{}", rec.id);
        assert!(segments <= gt_words.max(h_words));
        let base = scorer.baseline(&rec.gt, &rec.h).unwrap();
        assert_eq!(base.cosine_calls, gt_words * h_words, "{}", rec.id);
    }
}

#[test]
fn call_ratio_grows_with_length() {
    let scorer = Scorer::from_config(&EmbedderConfig::mock(0)).unwrap();
    let lengths = [10.0, 20.0, 40.0, 80.0];
    let ratios: Vec<f64> = lengths
        .iter()
        .map(|&len| {
            let records = square_pairs(10, len as usize, 17);
            let table = benchmark(&records, &scorer, &BenchOptions { repeats: 1 }).unwrap();
            table.mean_call_ratio.unwrap()
        })
        .collect();
    let mx = lengths.iter().sum::<f64>() / 4.0;
    let my = ratios.iter().sum::<f64>() / 4.0;
    let slope = lengths
        .iter()
        .zip(&ratios)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / lengths.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    println!("call ratios {ratios:?}, slope {slope:.3} per word");
    assert!(slope > 0.0);
}

/// Records how often character MER differs between argument orders. The
/// fixed backtrace preference can pick optimal paths with different hit
/// counts, so symmetry is measured rather than asserted.
#[test]
fn mer_symmetry_on_fuzz_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let alphabet = ['a', 'b', 'c', ' '];
    let word = |rng: &mut ChaCha8Rng| -> String {
        let n = (rng.next_u64() % 16) as usize;
        (0..n)
            .map(|_| alphabet[(rng.next_u64() % 4) as usize])
            .collect()
    };
    let (mut asymmetric, mut max_gap, total) = (0usize, 0.0f64, 10_000);
    for _ in 0..total {
        let (a, b) = (word(&mut rng), word(&mut rng));
        assert_eq!(mer(&a, &a), 0.0);
        let gap = (mer(&a, &b) - mer(&b, &a)).abs();
        if gap > 0.0 {
            asymmetric += 1;
            max_gap = max_gap.max(gap);
        }
    }
    println!("mer asymmetric on {asymmetric}/{total} pairs, max gap {max_gap:.4}");
}
