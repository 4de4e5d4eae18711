//! Strength in bits: log2 of a password's rank among all dimension
//! combinations ordered by decreasing probability.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{dim_log2p, Dimension, DimensionKeys, Model};

/// Default attacker throughput in guesses per second.
pub const DEFAULT_CRACK_RATE: f64 = 3.6e6;

/// Largest support size [`exact_rank_bits`] will enumerate.
pub const MAX_EXACT_COMBINATIONS: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Weak,
    Fair,
    Strong,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Weak => "weak",
            Category::Fair => "fair",
            Category::Strong => "strong",
        }
    }
}

/// Upper bounds (inclusive) of the weak and fair categories, in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub weak_max: f64,
    pub fair_max: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { weak_max: 29.0, fair_max: 37.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthReport {
    pub log2p: f64,
    pub strength_bits: f64,
    pub category: Category,
    pub crack_seconds: f64,
    pub crack_human: String,
}

impl StrengthReport {
    pub fn new(log2p: f64, strength_bits: f64, thresholds: &Thresholds, crack_rate: f64) -> Self {
        let (crack_seconds, crack_human) = crack_time(strength_bits, crack_rate);
        Self { log2p, strength_bits, category: categorize_with(strength_bits, thresholds), crack_seconds, crack_human }
    }

    /// `Your password is weak. Hackers may guess your password within 4 minutes.`
    pub fn feedback_text(&self) -> String {
        let when = if self.crack_seconds < 1.0 {
            "in less than a second".to_owned()
        } else if self.crack_human == "centuries" {
            "only after centuries".to_owned()
        } else {
            format!("within {}", self.crack_human)
        };
        format!("Your password is {}. Hackers may guess your password {when}.", self.category.as_str())
    }
}

/// The five per-dimension log2-probabilities, in [`Dimension::ALL`] order.
pub fn dimension_log2ps(model: &Model, keys: &DimensionKeys) -> [f64; 5] {
    Dimension::ALL.map(|dim| dim_log2p(model, dim, keys.get(dim)))
}

/// log2 of the product of the per-dimension probabilities.
pub fn password_log2p(model: &Model, keys: &DimensionKeys) -> f64 {
    dimension_log2ps(model, keys).iter().sum()
}

/// Rank estimator over the convolution of the per-dimension
/// `-log2 p` histograms.
///
/// Every key (plus one smoothed pseudo-key per dimension) is binned by
/// `floor(-log2 p / b)`. Convolving the five histograms groups the
/// combinations by the sum of their bin indices; alongside the count, each
/// convolved bin tracks the summed `-log2 p` of its combinations, so every
/// bin's mass can be placed at its centroid. A bin with index sum `s` holds
/// combinations in `[s*b, (s+5)*b)`, which bounds the error of the
/// centroid placement by `5*b` bits of probability.
#[derive(Debug, Clone)]
pub struct RankEstimator {
    bin_width: f64,
    /// Bin centroids (`-log2 p`) in ascending order.
    centroids: Vec<f64>,
    /// Combinations at or below each centroid.
    cumulative: Vec<f64>,
    histogram: Vec<f64>,
    total: f64,
}

impl RankEstimator {
    pub fn new(model: &Model) -> Self {
        let mut mass = vec![1.0];
        let mut sums = vec![0.0];
        for dim in Dimension::ALL {
            let hist = model.histogram(dim);
            (mass, sums) = convolve(&mass, &sums, &hist.bins, &hist.sums);
        }
        let mut bins: Vec<(f64, f64)> =
            mass.iter().zip(&sums).filter(|(m, _)| **m > 0.0).map(|(&m, &sx)| (sx / m, m)).collect();
        bins.sort_by(|a, b| a.0.total_cmp(&b.0));
        let centroids = bins.iter().map(|b| b.0).collect();
        let cumulative = bins
            .iter()
            .scan(0.0, |acc, b| {
                *acc += b.1;
                Some(*acc)
            })
            .collect();
        let total = Dimension::ALL.iter().map(|&d| (model.table(d).len() + 1) as f64).product();
        Self { bin_width: model.bin_width(), centroids, cumulative, histogram: mass, total }
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    /// Number of combinations in the support (observed keys plus one
    /// pseudo-key per dimension).
    pub fn total_combinations(&self) -> f64 {
        self.total
    }

    /// Convolved counts indexed by summed bin index.
    pub fn histogram(&self) -> &[f64] {
        &self.histogram
    }

    /// Estimated number of combinations at least as probable as `log2p`,
    /// clamped to `[1, total]`.
    pub fn estimate_rank(&self, log2p: f64) -> f64 {
        let x = -log2p + CENTROID_EPSILON;
        let n = self.centroids.partition_point(|&c| c <= x);
        let rank = if n == 0 { 1.0 } else { self.cumulative[n - 1] };
        rank.clamp(1.0, self.total)
    }

    /// Strength in bits, `log2(rank)`.
    pub fn estimate_rank_bits(&self, log2p: f64) -> f64 {
        self.estimate_rank(log2p).log2()
    }
}

/// Absorbs rounding in centroid sums so exact ties count as "at least as
/// probable".
const CENTROID_EPSILON: f64 = 1e-9;

/// Convolves (count, summed value) histograms.
fn convolve(mass_a: &[f64], sums_a: &[f64], mass_b: &[f64], sums_b: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let len = mass_a.len() + mass_b.len() - 1;
    let mut mass = vec![0.0; len];
    let mut sums = vec![0.0; len];
    for (i, (&ma, &sa)) in mass_a.iter().zip(sums_a).enumerate() {
        if ma == 0.0 {
            continue;
        }
        for (j, (&mb, &sb)) in mass_b.iter().zip(sums_b).enumerate() {
            if mb == 0.0 {
                continue;
            }
            mass[i + j] += ma * mb;
            sums[i + j] += sa * mb + ma * sb;
        }
    }
    (mass, sums)
}

pub fn estimate_rank_bits(estimator: &RankEstimator, log2p: f64) -> f64 {
    estimator.estimate_rank_bits(log2p)
}

/// Exact rank by enumerating every combination of the model's support.
/// Brute-force reference for [`RankEstimator`].
pub fn exact_rank_bits(model: &Model, log2p: f64) -> Result<f64> {
    let values: Vec<Vec<f64>> = Dimension::ALL
        .iter()
        .map(|&dim| {
            let table = model.table(dim);
            let mut v: Vec<f64> = table.iter().map(|(k, _)| table.log2p(k)).collect();
            v.push(table.floor_log2p());
            v
        })
        .collect();
    let combos: u128 = values.iter().map(|v| v.len() as u128).product();
    if combos > MAX_EXACT_COMBINATIONS {
        return Err(Error::TooManyCombinations(combos));
    }
    let threshold = log2p - 1e-9;
    let mut rank: u64 = 0;
    for &a in &values[0] {
        for &b in &values[1] {
            for &c in &values[2] {
                for &d in &values[3] {
                    for &e in &values[4] {
                        if a + b + c + d + e >= threshold {
                            rank += 1;
                        }
                    }
                }
            }
        }
    }
    Ok((rank.max(1) as f64).log2())
}

/// Category under the default 29/37-bit thresholds.
pub fn categorize(strength_bits: f64) -> Category {
    categorize_with(strength_bits, &Thresholds::default())
}

pub fn categorize_with(strength_bits: f64, thresholds: &Thresholds) -> Category {
    if strength_bits <= thresholds.weak_max {
        Category::Weak
    } else if strength_bits <= thresholds.fair_max {
        Category::Fair
    } else {
        Category::Strong
    }
}

const UNITS: [(&str, f64); 5] =
    [("year", 365.0 * 86_400.0), ("day", 86_400.0), ("hour", 3_600.0), ("minute", 60.0), ("second", 1.0)];

/// Expected time to guess a password of the given strength: `2^PS / CR`
/// seconds, and that duration rounded up in the largest whole unit.
pub fn crack_time(strength_bits: f64, crack_rate: f64) -> (f64, String) {
    let seconds = strength_bits.exp2() / crack_rate;
    (seconds, humanize_seconds(seconds))
}

pub fn humanize_seconds(seconds: f64) -> String {
    if seconds < 1.0 {
        return "less than a second".to_owned();
    }
    let (unit, size) = UNITS.iter().copied().find(|&(_, size)| seconds >= size).unwrap_or(UNITS[4]);
    let n = (seconds / size).ceil();
    if unit == "year" && n > 100.0 {
        return "centuries".to_owned();
    }
    if n == 1.0 {
        format!("1 {unit}")
    } else {
        format!("{n} {unit}s")
    }
}
