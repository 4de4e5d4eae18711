use std::collections::BTreeMap;
use std::io::{BufRead, BufReader};

use dpar_core::decompose::{decompose, PasswordPolicy};
use dpar_core::model::TrainOptions;
use dpar_core::recommend::{
    edit_script, generate_candidates, keeps_candidate, levenshtein, mask_preview, seeded_rng, select_recommendations,
    EditOp, RecommenderConfig, ScoredCandidate,
};
use dpar_core::{train, Engine, L33tTable};
use flate2::read::GzDecoder;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn corpus(limit: usize) -> Vec<String> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/xato_top100k.txt.gz");
    BufReader::new(GzDecoder::new(std::fs::File::open(path).unwrap())).lines().take(limit).map(|l| l.unwrap()).collect()
}

fn engine(lines: usize) -> Engine {
    let table = L33tTable::default();
    let model = train(corpus(lines).into_iter().map(Ok), &table, &TrainOptions::default()).unwrap();
    Engine::new(model, table).unwrap()
}

/// Full-matrix edit distance plus a backtracked script, as (distance,
/// substitutions, insertions).
fn dp_oracle(a: &str, b: &str) -> (usize, usize, usize) {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in 0..=a.len() {
        for j in 0..=b.len() {
            d[i][j] = if i == 0 {
                j
            } else if j == 0 {
                i
            } else {
                (d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1])).min(d[i - 1][j] + 1).min(d[i][j - 1] + 1)
            };
        }
    }
    let (mut i, mut j, mut subs, mut ins) = (a.len(), b.len(), 0, 0);
    while i > 0 || j > 0 {
        if i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]) {
            subs += usize::from(a[i - 1] != b[j - 1]);
            i -= 1;
            j -= 1;
        } else if j > 0 && d[i][j] == d[i][j - 1] + 1 {
            ins += 1;
            j -= 1;
        } else {
            i -= 1;
        }
    }
    (d[a.len()][b.len()], subs, ins)
}

#[test]
fn levenshtein_matches_dp_oracle() {
    let alphabet: Vec<char> = "ab1@Zx".chars().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1_000 {
        let a: String = (0..rng.gen_range(0..12)).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect();
        let b: String = (0..rng.gen_range(0..12)).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect();
        assert_eq!(levenshtein(&a, &b), dp_oracle(&a, &b).0, "{a:?} {b:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn mask_follows_a_minimal_script(a in "[ab1@]{0,10}", b in "[ab1@]{1,10}") {
        let script = edit_script(&a, &b);
        let (dist, _, _) = dp_oracle(&a, &b);

        let mut rebuilt = String::new();
        let mut consumed = String::new();
        let mut edits = 0;
        let mut shown = 0;
        for op in &script {
            match *op {
                EditOp::Keep(c) => { rebuilt.push(c); consumed.push(c); }
                EditOp::Substitute { from, to } => {
                    prop_assert_ne!(from, to);
                    rebuilt.push(to); consumed.push(from); edits += 1; shown += 1;
                }
                EditOp::Insert(c) => { rebuilt.push(c); edits += 1; shown += 1; }
                EditOp::Delete(c) => { consumed.push(c); edits += 1; }
            }
        }
        prop_assert_eq!(&consumed, &a);
        prop_assert_eq!(&rebuilt, &b);
        prop_assert_eq!(edits, dist);

        let mask = mask_preview(&a, &b);
        prop_assert_eq!(mask.chars().count(), b.chars().count());
        prop_assert_eq!(mask.chars().filter(|&c| c != '*').count(), shown);
    }
}

fn scored_candidates(
    engine: &Engine,
    password: &str,
    config: &RecommenderConfig,
    seed: u64,
) -> (ScoredCandidate, Vec<ScoredCandidate>) {
    let original = engine.score(engine.decompose(password));
    let mut rng = seeded_rng(seed);
    let candidates = generate_candidates(&original.parts, engine.table(), config, &mut rng)
        .unwrap()
        .into_iter()
        .map(|p| {
            let mut c = engine.score(p);
            c.ld = levenshtein(password, c.password());
            c
        })
        .collect();
    (original, candidates)
}

#[test]
fn seeded_runs_respect_invariants_and_per_distance_optimality() {
    let engine = engine(20_000);
    let config = RecommenderConfig::default();
    let sample: Vec<String> = corpus(20_000).into_iter().filter(|p| config.policy.check(p).valid).take(60).collect();
    for (i, password) in sample.iter().enumerate() {
        let seed = 1_000 + i as u64;
        let run = RecommenderConfig { seed: Some(seed), ..config.clone() };
        let outcome = engine.recommend(password, &run).unwrap();
        assert!(outcome.candidate_count <= 676);
        let base = &outcome.original.parts.base_word;
        let mut last_ld = 0;
        for r in &outcome.recommendations {
            assert!(r.strength_bits >= outcome.report.strength_bits);
            assert!(r.ld >= 1 && r.ld > last_ld);
            last_ld = r.ld;
            assert_eq!(&r.parts.base_word, base);
            assert!(config.policy.check(&r.password).valid);
            // what an analyzer sees matches what the recommender scored
            assert_eq!(decompose(&r.password, engine.table(), Some(engine.model())), r.parts);
        }

        // exhaustive max scan over the same candidate set
        let (original, candidates) = scored_candidates(&engine, password, &run, seed);
        assert_eq!(candidates.len(), outcome.candidate_count);
        let mut best: BTreeMap<usize, f64> = BTreeMap::new();
        for c in candidates.iter().filter(|c| keeps_candidate(c, original.strength_bits, &run)) {
            let e = best.entry(c.ld).or_insert(f64::NEG_INFINITY);
            *e = e.max(c.strength_bits);
        }
        let table: BTreeMap<usize, f64> = outcome.table.iter().map(|(ld, c)| (*ld, c.strength_bits)).collect();
        assert_eq!(table, best, "{password}");
    }
}

#[test]
fn all_productive_generators_give_675() {
    let engine = engine(5_000);
    for seed in 0..20 {
        let config = RecommenderConfig { seed: Some(seed), ..Default::default() };
        let outcome = engine.recommend("password1", &config).unwrap();
        assert_eq!(outcome.candidate_count, 675);
    }
}

#[test]
fn sparse_buckets_fall_back() {
    let engine = engine(2_000);
    let original = engine.score(engine.decompose("monkey12"));
    let make = |pw: &str, ld: usize, bits: f64| {
        let mut c = engine.score(engine.decompose(pw));
        c.ld = ld;
        c.strength_bits = bits;
        c
    };
    let candidates = vec![
        make("monkey1!", 2, original.strength_bits + 1.0),
        make("monkey1#", 2, original.strength_bits + 3.0),
        make("#monkey12%$", 5, original.strength_bits + 9.0),
        make("monkey13", 4, original.strength_bits - 1.0),
    ];
    let selection = select_recommendations(candidates, &original, &RecommenderConfig::default(), &mut seeded_rng(0));
    let lds: Vec<usize> = selection.buttons.iter().map(|b| b.ld).collect();
    assert_eq!(lds, vec![2, 5]);
    assert_eq!(selection.buttons[0].password(), "monkey1#");
    assert!(!selection.table.contains_key(&4));
}

#[test]
fn empty_candidate_table_gives_no_buttons() {
    let engine = engine(2_000);
    let config = RecommenderConfig { min_strength: Some(1e6), seed: Some(1), ..Default::default() };
    let outcome = engine.recommend("password1", &config).unwrap();
    assert!(outcome.recommendations.is_empty());
    assert!(outcome.table.is_empty());
}

#[test]
fn same_seed_same_output() {
    let engine = engine(5_000);
    let config = RecommenderConfig { seed: Some(42), ..Default::default() };
    let a = engine.recommend("1qaz1qaz", &config).unwrap();
    let b = engine.recommend("1qaz1qaz", &config).unwrap();
    assert_eq!(a, b);
    let other = engine.recommend("1qaz1qaz", &RecommenderConfig { seed: Some(43), ..config }).unwrap();
    assert_eq!(other.report, a.report);
}

#[test]
fn policy_violations_are_errors_unless_waived() {
    let engine = engine(2_000);
    let err = engine.recommend("amsterdam", &RecommenderConfig::default()).unwrap_err();
    assert!(matches!(err, dpar_core::Error::Policy(_)));
    let waived = RecommenderConfig { policy: PasswordPolicy::permissive(), seed: Some(5), ..Default::default() };
    let outcome = engine.recommend("amsterdam", &waived).unwrap();
    assert!(!outcome.recommendations.is_empty());
}
