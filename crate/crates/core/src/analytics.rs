//! Aggregate statistics over CD results.
//!
//! Every statistic ignores undefined values. Quantiles use linear
//! interpolation between the closest order statistics (`h = (n - 1) p`), and
//! the standard deviation is the population one.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cd::CdResult;
use crate::graph::{CitationNetwork, PubId};

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("no defined CD values")]
    EmptyInput,
    #[error("bin width must be positive, got {0}")]
    NonPositiveBinWidth(f64),
    #[error("no year known for publication {0}")]
    MissingYear(PubId),
    #[error("top fraction must lie in (0, 0.5), got {0}")]
    InvalidFraction(f64),
    #[error("label maps share no publication")]
    NoOverlap,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn defined_values(results: &[CdResult]) -> Vec<f64> {
    results.iter().filter_map(|r| r.cd).collect()
}

/// Linear-interpolation quantile of an ascending, non-empty slice.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty slice");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

fn sort_values(values: &mut [f64]) {
    values.sort_unstable_by(f64::total_cmp);
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub count: u64,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q95: f64,
    pub q99: f64,
    pub max: f64,
}

pub fn summarize(results: &[CdResult]) -> Result<SummaryStats, AnalyticsError> {
    summarize_values(defined_values(results))
}

pub fn summarize_values(mut values: Vec<f64>) -> Result<SummaryStats, AnalyticsError> {
    if values.is_empty() {
        return Err(AnalyticsError::EmptyInput);
    }
    // Welford
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &x) in values.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    let count = values.len();
    sort_values(&mut values);
    let q = |p| quantile_sorted(&values, p);
    Ok(SummaryStats {
        count: count as u64,
        mean,
        std: (m2 / count as f64).sqrt(),
        min: values[0],
        q25: q(0.25),
        q50: q(0.50),
        q75: q(0.75),
        q95: q(0.95),
        q99: q(0.99),
        max: values[count - 1],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub count: u64,
}

/// Fixed-width bins over `[-1, 1]`. Bins are `[lower, lower + width)` except
/// the last, which also holds `1.0` and is truncated at `1.0` when the width
/// does not divide the interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_width: f64,
    pub bins: Vec<HistogramBin>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.bins.iter().map(|b| b.count).sum()
    }
}

pub const DEFAULT_BIN_WIDTH: f64 = 0.01;

pub fn histogram(results: &[CdResult], bin_width: f64) -> Result<Histogram, AnalyticsError> {
    histogram_values(&defined_values(results), bin_width)
}

pub fn histogram_values(values: &[f64], bin_width: f64) -> Result<Histogram, AnalyticsError> {
    if bin_width <= 0.0 || !bin_width.is_finite() {
        return Err(AnalyticsError::NonPositiveBinWidth(bin_width));
    }
    if values.is_empty() {
        return Err(AnalyticsError::EmptyInput);
    }
    let ratio = 2.0 / bin_width;
    let nbins = if (ratio - ratio.round()).abs() < 1e-9 {
        ratio.round()
    } else {
        ratio.ceil()
    }
    .max(1.0) as usize;
    let lower = |i: usize| -1.0 + i as f64 * bin_width;

    let mut bins: Vec<HistogramBin> = (0..nbins)
        .map(|i| HistogramBin {
            lower: lower(i),
            count: 0,
        })
        .collect();
    for &v in values {
        // Estimate, then settle against the stored edges so that membership
        // is decided by exactly the edges that are reported.
        let guess = ((v + 1.0) / bin_width).floor();
        let mut i = if guess.is_nan() || guess < 0.0 {
            0
        } else {
            (guess as usize).min(nbins - 1)
        };
        while i > 0 && v < lower(i) {
            i -= 1;
        }
        while i + 1 < nbins && v >= lower(i + 1) {
            i += 1;
        }
        bins[i].count += 1;
    }
    Ok(Histogram { bin_width, bins })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    pub year: i32,
    pub mean_cd: f64,
    pub count: u64,
}

/// Source of publication years for [`yearly_trend`].
pub trait YearLookup {
    fn year_of(&self, id: &PubId) -> Option<i32>;
}

impl YearLookup for HashMap<PubId, i32> {
    fn year_of(&self, id: &PubId) -> Option<i32> {
        self.get(id).copied()
    }
}

impl YearLookup for BTreeMap<PubId, i32> {
    fn year_of(&self, id: &PubId) -> Option<i32> {
        self.get(id).copied()
    }
}

impl YearLookup for CitationNetwork {
    fn year_of(&self, id: &PubId) -> Option<i32> {
        CitationNetwork::year_of(self, id)
    }
}

/// Mean defined CD per publication year, ascending by year. Values are summed
/// in input order.
pub fn yearly_trend(
    results: &[CdResult],
    years: &dyn YearLookup,
) -> Result<Vec<TrendPoint>, AnalyticsError> {
    let mut groups: BTreeMap<i32, (f64, u64)> = BTreeMap::new();
    for r in results {
        let year = years
            .year_of(&r.focal)
            .ok_or_else(|| AnalyticsError::MissingYear(r.focal.clone()))?;
        if let Some(cd) = r.cd {
            let entry = groups.entry(year).or_insert((0.0, 0));
            entry.0 += cd;
            entry.1 += 1;
        }
    }
    Ok(groups
        .into_iter()
        .map(|(year, (sum, count))| TrendPoint {
            year,
            mean_cd: sum / count as f64,
            count,
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DisruptionLabel {
    Consolidating,
    Neutral,
    Disruptive,
}

impl DisruptionLabel {
    pub const ALL: [DisruptionLabel; 3] = [
        DisruptionLabel::Consolidating,
        DisruptionLabel::Neutral,
        DisruptionLabel::Disruptive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DisruptionLabel::Consolidating => "consolidating",
            DisruptionLabel::Neutral => "neutral",
            DisruptionLabel::Disruptive => "disruptive",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

pub const DEFAULT_TOP_FRACTION: f64 = 0.01;

/// Labels the top `top_fraction` of defined values disruptive and the bottom
/// `top_fraction` consolidating. Values equal to a threshold are neutral.
pub fn classify(
    results: &[CdResult],
    top_fraction: f64,
) -> Result<BTreeMap<PubId, DisruptionLabel>, AnalyticsError> {
    if !(top_fraction > 0.0 && top_fraction < 0.5) {
        return Err(AnalyticsError::InvalidFraction(top_fraction));
    }
    let mut values = defined_values(results);
    if values.is_empty() {
        return Err(AnalyticsError::EmptyInput);
    }
    sort_values(&mut values);
    let hi = quantile_sorted(&values, 1.0 - top_fraction);
    let lo = quantile_sorted(&values, top_fraction);
    Ok(results
        .iter()
        .filter_map(|r| {
            let cd = r.cd?;
            let label = if cd > hi {
                DisruptionLabel::Disruptive
            } else if cd < lo {
                DisruptionLabel::Consolidating
            } else {
                DisruptionLabel::Neutral
            };
            Some((r.focal.clone(), label))
        })
        .collect())
}

/// Which side of a comparison is treated as ground truth.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Truth {
    #[default]
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: DisruptionLabel,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
    /// Set when some ratio had a zero denominator and was reported as 0.
    pub zero_division: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelComparison {
    /// `matrix[a][b]`, indexed in [`DisruptionLabel::ALL`] order.
    pub matrix: [[u64; 3]; 3],
    pub truth: Truth,
    pub metrics: [ClassMetrics; 3],
}

impl LabelComparison {
    pub fn total(&self) -> u64 {
        self.matrix.iter().flatten().sum()
    }

    pub fn metrics_for(&self, label: DisruptionLabel) -> &ClassMetrics {
        &self.metrics[label.slot()]
    }
}

pub fn compare_labels(
    a: &BTreeMap<PubId, DisruptionLabel>,
    b: &BTreeMap<PubId, DisruptionLabel>,
) -> Result<LabelComparison, AnalyticsError> {
    compare_labels_with(a, b, Truth::A)
}

/// Confusion matrix over the publications present in both maps, rows from
/// `a`, columns from `b`, with per-class metrics taking `truth` as reference.
pub fn compare_labels_with(
    a: &BTreeMap<PubId, DisruptionLabel>,
    b: &BTreeMap<PubId, DisruptionLabel>,
    truth: Truth,
) -> Result<LabelComparison, AnalyticsError> {
    let mut matrix = [[0u64; 3]; 3];
    for (id, la) in a {
        if let Some(lb) = b.get(id) {
            matrix[la.slot()][lb.slot()] += 1;
        }
    }
    if matrix.iter().flatten().all(|&c| c == 0) {
        return Err(AnalyticsError::NoOverlap);
    }

    let ratio = |num: u64, den: u64, flag: &mut bool| {
        if den == 0 {
            *flag = true;
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let metrics = DisruptionLabel::ALL.map(|label| {
        let i = label.slot();
        let row: u64 = matrix[i].iter().sum();
        let col: u64 = matrix.iter().map(|r| r[i]).sum();
        let (true_total, predicted_total) = match truth {
            Truth::A => (row, col),
            Truth::B => (col, row),
        };
        let diag = matrix[i][i];
        let mut zero_division = false;
        let precision = ratio(diag, predicted_total, &mut zero_division);
        let recall = ratio(diag, true_total, &mut zero_division);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        ClassMetrics {
            label,
            precision,
            recall,
            f1,
            support: true_total,
            zero_division,
        }
    });
    Ok(LabelComparison {
        matrix,
        truth,
        metrics,
    })
}

/// Writes `bin_lower,source,count` rows for each named histogram.
pub fn write_histogram_csv<W: Write>(
    writer: W,
    histograms: &[(&str, &Histogram)],
) -> Result<(), AnalyticsError> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["bin_lower", "source", "count"])?;
    for (source, hist) in histograms {
        for bin in &hist.bins {
            out.write_record([
                format!("{:.6}", bin.lower),
                source.to_string(),
                bin.count.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Writes `year,mean_cd,count` rows.
pub fn write_trend_csv<W: Write>(writer: W, points: &[TrendPoint]) -> Result<(), AnalyticsError> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["year", "mean_cd", "count"])?;
    for p in points {
        out.write_record([
            p.year.to_string(),
            format!("{:.6}", p.mean_cd),
            p.count.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
