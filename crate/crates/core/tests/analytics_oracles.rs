mod common;

use std::collections::{BTreeMap, HashMap};

use cdindex::analytics::{
    classify, compare_labels, histogram, summarize, yearly_trend, DisruptionLabel,
};
use cdindex::{CdResult, PubId};
use common::{oracle_quantile, pid};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn result(i: usize, cd: Option<f64>) -> CdResult {
    CdResult {
        focal: pid(&format!("p{i:06}")),
        t: 5,
        cd,
        n: cd.map_or(0, |_| 1),
        k: 1,
        n_disruptive: 0,
        n_neutral: 0,
        n_consolidating: 0,
    }
}

/// Mostly near zero, a lump at exactly 1 and some undefined rows.
fn random_results(seed: u64, count: usize) -> Vec<CdResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let cd = match rng.gen_range(0..10) {
                0 => None,
                1 => Some(1.0),
                2 => Some(-1.0),
                _ => {
                    let n = rng.gen_range(1..200i64);
                    Some(rng.gen_range(-n..=n) as f64 / n as f64)
                }
            };
            result(i, cd)
        })
        .collect()
}

#[test]
fn summary_matches_sort_oracle() {
    let results = random_results(1, 10_000);
    let values: Vec<f64> = results.iter().filter_map(|r| r.cd).collect();
    let stats = summarize(&results).unwrap();
    assert_eq!(stats.count as usize, values.len());
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
    assert!((stats.mean - mean).abs() < 1e-12);
    assert!((stats.std - var.sqrt()).abs() < 1e-12);
    for (got, p) in [
        (stats.q25, 0.25),
        (stats.q50, 0.50),
        (stats.q75, 0.75),
        (stats.q95, 0.95),
        (stats.q99, 0.99),
        (stats.min, 0.0),
        (stats.max, 1.0),
    ] {
        assert_eq!(got, oracle_quantile(&values, p), "p = {p}");
    }
}

#[test]
fn histogram_matches_naive_binning() {
    let results = random_results(2, 10_000);
    let values: Vec<f64> = results.iter().filter_map(|r| r.cd).collect();
    for width in [0.01, 0.05, 0.3, 2.0] {
        let hist = histogram(&results, width).unwrap();
        assert_eq!(hist.total() as usize, values.len());
        let last = hist.bins.len() - 1;
        for (i, bin) in hist.bins.iter().enumerate() {
            let lower = bin.lower;
            let expected = values
                .iter()
                .filter(|&&v| {
                    if i == last {
                        v >= lower
                    } else {
                        v >= lower && v < hist.bins[i + 1].lower
                    }
                })
                .count();
            assert_eq!(bin.count as usize, expected, "width {width} bin {i}");
        }
    }
    assert_eq!(histogram(&results, 0.01).unwrap().bins.len(), 200);
}

#[test]
fn trend_matches_group_by() {
    let results = random_results(3, 10_000);
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let years: HashMap<PubId, i32> = results
        .iter()
        .map(|r| (r.focal.clone(), rng.gen_range(1950..2020)))
        .collect();
    let trend = yearly_trend(&results, &years).unwrap();

    let mut groups: HashMap<i32, Vec<f64>> = HashMap::new();
    for r in &results {
        if let Some(cd) = r.cd {
            groups.entry(years[&r.focal]).or_default().push(cd);
        }
    }
    assert_eq!(trend.len(), groups.len());
    assert!(trend.windows(2).all(|w| w[0].year < w[1].year));
    for point in trend {
        let g = &groups[&point.year];
        assert_eq!(point.count as usize, g.len());
        let mut sum = 0.0;
        for v in g {
            sum += v;
        }
        assert_eq!(point.mean_cd, sum / g.len() as f64);
    }
}

fn oracle_labels(results: &[CdResult], fraction: f64) -> BTreeMap<PubId, DisruptionLabel> {
    let values: Vec<f64> = results.iter().filter_map(|r| r.cd).collect();
    let hi = oracle_quantile(&values, 1.0 - fraction);
    let lo = oracle_quantile(&values, fraction);
    results
        .iter()
        .filter_map(|r| {
            r.cd.map(|cd| {
                let label = if cd > hi {
                    DisruptionLabel::Disruptive
                } else if cd < lo {
                    DisruptionLabel::Consolidating
                } else {
                    DisruptionLabel::Neutral
                };
                (r.focal.clone(), label)
            })
        })
        .collect()
}

#[test]
fn classify_matches_sort_oracle() {
    let results = random_results(4, 10_000);
    for fraction in [0.01, 0.05, 0.2] {
        assert_eq!(
            classify(&results, fraction).unwrap(),
            oracle_labels(&results, fraction)
        );
    }
}

#[test]
fn classify_distinct_ascending() {
    let results: Vec<CdResult> = (0..1000)
        .map(|i| result(i, Some(-1.0 + 2.0 * i as f64 / 999.0)))
        .collect();
    let labels = classify(&results, 0.01).unwrap();
    let count = |l| labels.values().filter(|&&x| x == l).count();
    assert_eq!(count(DisruptionLabel::Disruptive), 10);
    assert_eq!(count(DisruptionLabel::Consolidating), 10);
    // the top ten by value are the disruptive ones
    for r in &results[990..] {
        assert_eq!(labels[&r.focal], DisruptionLabel::Disruptive);
    }
    for r in &results[..10] {
        assert_eq!(labels[&r.focal], DisruptionLabel::Consolidating);
    }
}

#[test]
fn self_comparison_is_perfect() {
    let results = random_results(5, 10_000);
    let labels = classify(&results, 0.01).unwrap();
    let cmp = compare_labels(&labels, &labels).unwrap();
    assert_eq!(cmp.total() as usize, labels.len());
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                assert_eq!(cmp.matrix[i][j], 0);
            }
        }
    }
    for m in &cmp.metrics {
        if m.support > 0 {
            assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
        }
    }
}

#[test]
fn constructed_ninety_percent_agreement() {
    use DisruptionLabel::*;
    let mut a = BTreeMap::new();
    let mut b = BTreeMap::new();
    // 1000 items, every tenth flipped
    for i in 0..1000 {
        let id = pid(&format!("x{i:04}"));
        let la = DisruptionLabel::ALL[i % 3];
        let lb = if i % 10 == 0 {
            DisruptionLabel::ALL[(i + 1) % 3]
        } else {
            la
        };
        a.insert(id.clone(), la);
        b.insert(id, lb);
    }
    // an id only in `a` is ignored
    a.insert(pid("only-a"), Disruptive);
    let cmp = compare_labels(&a, &b).unwrap();
    assert_eq!(cmp.total(), 1000);
    let off: u64 = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .map(|(i, j)| cmp.matrix[i][j])
        .sum();
    assert_eq!(off, 100);
    let support: u64 = cmp.metrics.iter().map(|m| m.support).sum();
    assert_eq!(support, 1000);
    for m in &cmp.metrics {
        assert!((0.0..=1.0).contains(&m.precision));
        assert!((0.0..=1.0).contains(&m.recall));
        assert!((0.0..=1.0).contains(&m.f1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classify_depends_only_on_rank(values in prop::collection::vec(-1.0f64..=1.0, 1..300), fraction in 0.001f64..0.49) {
        let results: Vec<CdResult> = values.iter().enumerate().map(|(i, &v)| result(i, Some(v))).collect();
        let base = classify(&results, fraction).unwrap();

        // strictly increasing affine map keeps the interpolated thresholds in
        // rank position, so labels are unchanged
        let shifted: Vec<CdResult> = values.iter().enumerate().map(|(i, &v)| result(i, Some(v * 0.5 + 0.25))).collect();
        let moved = classify(&shifted, fraction).unwrap();
        prop_assert_eq!(&base, &moved);

        let negated: Vec<CdResult> = values.iter().enumerate().map(|(i, &v)| result(i, Some(-v))).collect();
        let flipped = classify(&negated, fraction).unwrap();
        let count = |m: &BTreeMap<PubId, DisruptionLabel>, l| m.values().filter(|&&x| x == l).count();
        prop_assert_eq!(count(&base, DisruptionLabel::Disruptive), count(&flipped, DisruptionLabel::Consolidating));
        prop_assert_eq!(count(&base, DisruptionLabel::Consolidating), count(&flipped, DisruptionLabel::Disruptive));
    }

    #[test]
    fn quantiles_are_permutation_invariant(mut values in prop::collection::vec(-1.0f64..=1.0, 1..200), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let a = summarize(&values.iter().enumerate().map(|(i, &v)| result(i, Some(v))).collect::<Vec<_>>()).unwrap();
        values.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let b = summarize(&values.iter().enumerate().map(|(i, &v)| result(i, Some(v))).collect::<Vec<_>>()).unwrap();
        prop_assert_eq!((a.min, a.q25, a.q50, a.q75, a.q95, a.q99, a.max), (b.min, b.q25, b.q50, b.q75, b.q95, b.q99, b.max));
        prop_assert!(a.min <= a.q25 && a.q25 <= a.q50 && a.q50 <= a.q75 && a.q75 <= a.q95 && a.q95 <= a.q99 && a.q99 <= a.max);
    }

    #[test]
    fn histogram_total_is_width_independent(values in prop::collection::vec(-1.0f64..=1.0, 1..200), width in 0.001f64..2.5) {
        let results: Vec<CdResult> = values.iter().enumerate().map(|(i, &v)| result(i, Some(v))).collect();
        prop_assert_eq!(histogram(&results, width).unwrap().total() as usize, values.len());
    }
}
