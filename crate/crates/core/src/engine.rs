//! A loaded model paired with its l33t table and rank estimator.

use crate::decompose::{decompose, PasswordParts, PolicyResult};
use crate::error::{Error, Result};
use crate::l33t::L33tTable;
use crate::model::{DimensionKeys, Model};
use crate::recommend::{
    generate_candidates, levenshtein, seeded_rng, select_recommendations, CandidateTable, Recommendation,
    RecommenderConfig, ScoredCandidate,
};
use crate::strength::{dimension_log2ps, RankEstimator, StrengthReport};

#[derive(Debug, Clone)]
pub struct Engine {
    model: Model,
    table: L33tTable,
    estimator: RankEstimator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub policy: PolicyResult,
    /// Present only for policy-valid passwords.
    pub report: Option<StrengthReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecommendOutcome {
    pub report: StrengthReport,
    pub original: ScoredCandidate,
    pub candidate_count: usize,
    pub table: CandidateTable,
    pub recommendations: Vec<Recommendation>,
    pub seed: u64,
}

impl Engine {
    /// Fails if `model` was trained with a different l33t table.
    pub fn new(model: Model, table: L33tTable) -> Result<Self> {
        model.check_l33t_table(&table)?;
        let estimator = RankEstimator::new(&model);
        Ok(Self { model, table, estimator })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn table(&self) -> &L33tTable {
        &self.table
    }

    pub fn estimator(&self) -> &RankEstimator {
        &self.estimator
    }

    pub fn decompose(&self, password: &str) -> PasswordParts {
        decompose(password, &self.table, Some(&self.model))
    }

    /// Scores parts; `ld` is left at zero.
    pub fn score(&self, parts: PasswordParts) -> ScoredCandidate {
        let keys = DimensionKeys::from_parts(&parts, &self.table);
        let dim_log2p = dimension_log2ps(&self.model, &keys);
        let log2p = dim_log2p.iter().sum();
        let strength_bits = self.estimator.estimate_rank_bits(log2p);
        ScoredCandidate { parts, log2p, dim_log2p, strength_bits, ld: 0 }
    }

    pub fn strength_bits(&self, password: &str) -> f64 {
        self.score(self.decompose(password)).strength_bits
    }

    pub fn report(&self, password: &str, config: &RecommenderConfig) -> StrengthReport {
        let scored = self.score(self.decompose(password));
        StrengthReport::new(scored.log2p, scored.strength_bits, &config.thresholds, config.crack_rate)
    }

    pub fn analyze(&self, password: &str, config: &RecommenderConfig) -> Analysis {
        let policy = config.policy.check(password);
        let report = policy.valid.then(|| self.report(password, config));
        Analysis { policy, report }
    }

    /// Scores every candidate and selects up to three recommendations.
    /// Returns [`Error::Policy`] for passwords the configured policy rejects.
    pub fn recommend(&self, password: &str, config: &RecommenderConfig) -> Result<RecommendOutcome> {
        config.validate()?;
        let policy = config.policy.check(password);
        if !policy.valid {
            return Err(Error::Policy(policy.violations));
        }
        let seed = config.resolve_seed();
        let mut rng = seeded_rng(seed);

        let original = self.score(self.decompose(password));
        let report = StrengthReport::new(original.log2p, original.strength_bits, &config.thresholds, config.crack_rate);

        let candidates = generate_candidates(&original.parts, &self.table, config, &mut rng)?;
        let candidate_count = candidates.len();
        let scored: Vec<ScoredCandidate> = candidates
            .into_iter()
            .map(|parts| {
                let mut c = self.score(parts);
                c.ld = levenshtein(password, c.password());
                c
            })
            .collect();

        let selection = select_recommendations(scored, &original, config, &mut rng);
        let recommendations = selection
            .buttons
            .into_iter()
            .map(|c| Recommendation::from_candidate(password, c, config.crack_rate))
            .collect();
        Ok(RecommendOutcome { report, original, candidate_count, table: selection.table, recommendations, seed })
    }
}
