use std::collections::BTreeMap;
use std::io::{self, BufRead, BufReader};
use std::time::Instant;

use dpar_core::model::{dim_log2p, parse_model, train_reader, write_model, Dimension, TrainOptions};
use dpar_core::{train, L33tTable};
use flate2::read::GzDecoder;
use proptest::prelude::*;
use regex::Regex;

fn corpus(limit: usize) -> Vec<String> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/xato_top100k.txt.gz");
    let file = std::fs::File::open(path).expect("public corpus sample present");
    BufReader::new(GzDecoder::new(file)).lines().take(limit).map(|l| l.unwrap()).collect()
}

fn train_lines(lines: &[String]) -> dpar_core::Model {
    train(lines.iter().cloned().map(Ok), &L33tTable::default(), &TrainOptions::default()).unwrap()
}

#[test]
fn thousand_line_sample_recount() {
    let lines = corpus(1_000);
    let model = train_lines(&lines);
    for dim in Dimension::ALL {
        assert_eq!(model.table(dim).total(), 1_000, "{dim}");
    }

    // independent recount of the affix dimensions
    let re = Regex::new(r"^([^A-Za-z]*)(.*?)([^A-Za-z]*)$").unwrap();
    let mut prefixes: BTreeMap<String, u64> = BTreeMap::new();
    let mut suffixes: BTreeMap<String, u64> = BTreeMap::new();
    for line in &lines {
        let caps = re.captures(line).unwrap();
        let has_letter = line.chars().any(|c| c.is_ascii_alphabetic());
        let (p, s) = if has_letter { (&caps[1], &caps[3]) } else { ("", "") };
        *prefixes.entry(p.to_owned()).or_default() += 1;
        *suffixes.entry(s.to_owned()).or_default() += 1;
    }
    let table = |d| model.table(d).iter().map(|(k, c)| (k.to_owned(), c)).collect::<BTreeMap<_, _>>();
    assert_eq!(table(Dimension::Prefix), prefixes);
    assert_eq!(table(Dimension::Suffix), suffixes);

    let password_lines = lines
        .iter()
        .filter(|l| {
            let caps = re.captures(l).unwrap();
            caps[2].chars().any(|c| c.is_ascii_alphabetic()) && caps[2].eq_ignore_ascii_case("password")
        })
        .count() as u64;
    let base = model.table(Dimension::Base);
    assert!(base.count("password") >= password_lines);
    let expected = (base.count("password") as f64 / 1_000.0).log2();
    assert!((dim_log2p(&model, Dimension::Base, "password") - expected).abs() < 1e-12);
}

#[test]
fn probabilities_sum_to_one_and_follow_counts() {
    let model = train_lines(&corpus(5_000));
    for dim in Dimension::ALL {
        let table = model.table(dim);
        let sum: f64 = table.iter().map(|(k, _)| table.log2p(k).exp2()).sum();
        assert!((sum - 1.0).abs() < 1e-9, "{dim}: {sum}");
        let min_observed = table.iter().map(|(k, _)| table.log2p(k)).fold(0.0, f64::min);
        assert!(table.floor_log2p() < min_observed);
        let mut by_count: Vec<(u64, f64)> = table.iter().map(|(k, c)| (c, table.log2p(k))).collect();
        by_count.sort_by_key(|e| e.0);
        for w in by_count.windows(2) {
            if w[0].0 < w[1].0 {
                assert!(w[0].1 < w[1].1);
            }
        }
    }
}

#[test]
fn hundred_thousand_line_model_loads_quickly() {
    let lines = corpus(100_000);
    assert_eq!(lines.len(), 100_000);
    let model = train_lines(&lines);
    let mut bytes = Vec::new();
    write_model(&model, &mut bytes).unwrap();
    let start = Instant::now();
    let loaded = parse_model(&bytes).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(loaded, model);
    assert!(elapsed.as_secs_f64() < 2.0, "load took {elapsed:?}");
}

#[test]
fn reader_training_matches_iterator_training() {
    let lines = corpus(2_000);
    let joined = lines.join("\n");
    let (from_reader, stats) =
        train_reader(io::Cursor::new(joined), &L33tTable::default(), &TrainOptions::default()).unwrap();
    assert_eq!(stats.lines + stats.skipped, 2_000);
    assert_eq!(from_reader.table(Dimension::Base), train_lines(&lines).table(Dimension::Base));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn training_is_order_independent(
        lines in proptest::collection::vec("[a-zA-Z0-9!@#$]{1,12}", 1..60),
        seed in any::<u64>(),
    ) {
        let mut shuffled = lines.clone();
        let n = shuffled.len();
        let mut state = seed;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (state >> 33) as usize % (i + 1));
        }
        let a = train_lines(&lines);
        let b = train_lines(&shuffled);
        let (mut fa, mut fb) = (Vec::new(), Vec::new());
        write_model(&a, &mut fa).unwrap();
        write_model(&b, &mut fb).unwrap();
        prop_assert_eq!(fa, fb);
    }
}
