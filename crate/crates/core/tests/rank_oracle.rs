//! Histogram-convolution rank estimates against exhaustive enumeration.

use dpar_core::model::{Dimension, DimensionTable, Model, ModelMeta};
use dpar_core::strength::{exact_rank_bits, RankEstimator};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn skewed_table(dim: Dimension, keys: usize, rng: &mut impl Rng) -> DimensionTable {
    DimensionTable::from_counts(
        dim,
        (0..keys).map(|i| (format!("{dim}{i}"), 5_000 / (i as u64 + 1) + rng.gen_range(1..50))),
    )
}

/// 50 bases x 20 prefixes x 20 suffixes x 3 l33t x 3 cap = 180,000 observed
/// combinations.
fn toy_model(seed: u64) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes = [20, 20, 50, 3, 3];
    let tables = Dimension::ALL.map(|d| skewed_table(d, sizes[d.index()], &mut rng));
    let meta = ModelMeta { corpus_lines: 0, l33t_hash: "00".into(), format_version: 1 };
    Model::from_tables(tables, meta).unwrap()
}

fn random_observed_log2p(model: &Model, rng: &mut impl Rng) -> f64 {
    Dimension::ALL
        .iter()
        .map(|&d| {
            let table = model.table(d);
            let (key, _) = table.iter().nth(rng.gen_range(0..table.len())).unwrap();
            table.log2p(key)
        })
        .sum()
}

#[test]
fn toy_model_has_180k_observed_combinations() {
    let model = toy_model(7);
    let observed: usize = Dimension::ALL.iter().map(|&d| model.table(d).len()).product();
    assert_eq!(observed, 180_000);
}

#[test]
fn estimate_within_one_bit_of_exact() {
    let model = toy_model(7);
    let estimator = RankEstimator::new(&model);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let q = random_observed_log2p(&model, &mut rng);
        let est = estimator.estimate_rank_bits(q);
        let exact = exact_rank_bits(&model, q).unwrap();
        worst = worst.max((est - exact).abs());
        assert!((est - exact).abs() <= 1.0, "query {q}: estimate {est} exact {exact}");
    }
    eprintln!("worst |estimate - exact| = {worst:.4} bits");
}

#[test]
fn most_probable_combination_is_rank_one() {
    let model = toy_model(3);
    let estimator = RankEstimator::new(&model);
    let top: f64 = Dimension::ALL
        .iter()
        .map(|&d| {
            let t = model.table(d);
            t.iter().map(|(k, _)| t.log2p(k)).fold(f64::NEG_INFINITY, f64::max)
        })
        .sum();
    assert_eq!(exact_rank_bits(&model, top).unwrap(), 0.0);
    assert_eq!(estimator.estimate_rank_bits(top), 0.0);
}

#[test]
fn total_mass_is_product_of_supports() {
    let model = toy_model(11);
    let estimator = RankEstimator::new(&model);
    let expected = 21.0 * 21.0 * 51.0 * 4.0 * 4.0;
    assert_eq!(estimator.total_combinations(), expected);
    assert_eq!(estimator.histogram().iter().sum::<f64>(), expected);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn estimate_is_monotone(a in -80.0f64..0.0, b in -80.0f64..0.0) {
        let model = toy_model(5);
        let estimator = RankEstimator::new(&model);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(estimator.estimate_rank_bits(lo) >= estimator.estimate_rank_bits(hi));
    }

    #[test]
    fn small_models_agree_within_five_bins(
        counts in proptest::collection::vec(proptest::collection::vec(1u64..200, 1..6), 5),
        pick in proptest::collection::vec(0usize..6, 5),
    ) {
        let tables = Dimension::ALL.map(|d| {
            DimensionTable::from_counts(
                d,
                counts[d.index()].iter().enumerate().map(|(i, &c)| (format!("k{i}"), c)),
            )
        });
        let meta = ModelMeta { corpus_lines: 0, l33t_hash: "00".into(), format_version: 1 };
        let model = Model::from_tables(tables, meta).unwrap();
        let estimator = RankEstimator::new(&model);
        let q: f64 = Dimension::ALL.iter().map(|&d| {
            let t = model.table(d);
            let (k, _) = t.iter().nth(pick[d.index()] % t.len()).unwrap();
            t.log2p(k)
        }).sum();
        let est = estimator.estimate_rank(q);
        let slack = 5.0 * estimator.bin_width();
        // the estimate is bracketed by exact ranks at q +/- 5b
        let lower = exact_rank_bits(&model, q + slack).unwrap().exp2();
        let upper = exact_rank_bits(&model, q - slack).unwrap().exp2();
        prop_assert!(est >= lower - 1e-6 && est <= upper + 1e-6, "{lower} <= {est} <= {upper}");
    }
}
