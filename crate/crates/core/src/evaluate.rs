//! Offline improvement statistics over a sample of passwords.

use rand::seq::index::sample;
use rand::Rng;

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::recommend::{seeded_rng, RecommenderConfig};

pub const MIN_SAMPLE: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub password: String,
    pub original_bits: f64,
    /// Strongest button, or the original strength when no button survived.
    pub best_bits: f64,
    /// Distance of the strongest button; 0 when there is none.
    pub ld: usize,
    pub buttons: usize,
}

impl EvalRow {
    pub fn improvement(&self) -> f64 {
        self.best_bits - self.original_bits
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
    pub valid_lines: usize,
    pub seed: u64,
}

impl EvalReport {
    pub fn mean_improvement(&self) -> f64 {
        self.rows.iter().map(EvalRow::improvement).sum::<f64>() / self.rows.len() as f64
    }

    pub fn min_improvement(&self) -> f64 {
        self.rows.iter().map(EvalRow::improvement).fold(f64::INFINITY, f64::min)
    }
}

/// Samples up to `n` policy-valid passwords (in input order) and records the
/// strength of the strongest recommendation for each.
pub fn evaluate<S: AsRef<str>>(
    engine: &Engine,
    lines: &[S],
    n: usize,
    seed: u64,
    config: &RecommenderConfig,
) -> Result<EvalReport> {
    let valid: Vec<&str> =
        lines.iter().map(|l| l.as_ref().trim_end_matches('\r')).filter(|l| config.policy.check(l).valid).collect();
    if valid.len() < MIN_SAMPLE {
        return Err(Error::TooFewSamples { needed: MIN_SAMPLE, found: valid.len() });
    }
    let mut rng = seeded_rng(seed);
    let mut picked: Vec<usize> =
        if valid.len() <= n { (0..valid.len()).collect() } else { sample(&mut rng, valid.len(), n).into_vec() };
    picked.sort_unstable();

    let mut rows = Vec::with_capacity(picked.len());
    for idx in picked {
        let password = valid[idx];
        let run_config = RecommenderConfig { seed: Some(rng.gen()), ..config.clone() };
        let outcome = engine.recommend(password, &run_config)?;
        let best = outcome.recommendations.iter().max_by(|a, b| a.strength_bits.total_cmp(&b.strength_bits));
        rows.push(EvalRow {
            password: password.to_owned(),
            original_bits: outcome.report.strength_bits,
            best_bits: best.map_or(outcome.report.strength_bits, |r| r.strength_bits),
            ld: best.map_or(0, |r| r.ld),
            buttons: outcome.recommendations.len(),
        });
    }
    Ok(EvalReport { rows, valid_lines: valid.len(), seed })
}
