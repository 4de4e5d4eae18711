//! JSON payloads shared by the HTTP service and the CLI `--json` output.

use serde::{Deserialize, Serialize};

use crate::decompose::Violation;
use crate::engine::Engine;
use crate::error::Error;
use crate::recommend::{RecommenderConfig, Variant, RNG_ALGORITHM};
use crate::strength::Category;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeResponse {
    pub valid: bool,
    pub violations: Vec<Violation>,
    #[serde(rename = "PS")]
    pub ps: f64,
    pub category: Category,
    pub crack_seconds: f64,
    pub crack_human: String,
    pub feedback_text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Button {
    pub id: u32,
    pub label: String,
    pub password: String,
    #[serde(rename = "PS")]
    pub ps: f64,
    pub crack_human: String,
    pub ld: usize,
    pub mask_preview: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendResponse {
    #[serde(flatten)]
    pub analysis: AnalyzeResponse,
    pub buttons: Vec<Button>,
    pub variant: Variant,
    pub seed: u64,
    pub rng: String,
}

/// Body returned for passwords rejected by the policy. Never carries the
/// password itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyViolationBody {
    pub error: String,
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl PolicyViolationBody {
    pub fn new(violations: Vec<Violation>) -> Self {
        Self { error: "policy_violation".to_owned(), valid: false, violations }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzeRequest {
    pub password: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecommendRequest {
    pub password: String,
    #[serde(default)]
    pub variant: Option<Variant>,
    #[serde(default)]
    pub seed: Option<u64>,
}

pub fn analyze(
    engine: &Engine,
    password: &str,
    config: &RecommenderConfig,
) -> Result<AnalyzeResponse, PolicyViolationBody> {
    let analysis = engine.analyze(password, config);
    let Some(report) = analysis.report else {
        return Err(PolicyViolationBody::new(analysis.policy.violations));
    };
    Ok(AnalyzeResponse {
        valid: true,
        violations: Vec::new(),
        ps: report.strength_bits,
        category: report.category,
        crack_seconds: report.crack_seconds,
        feedback_text: report.feedback_text(),
        crack_human: report.crack_human,
    })
}

/// Runs the recommender. `config.seed` should already be resolved by the
/// caller when reproducible output is wanted.
pub fn recommend(
    engine: &Engine,
    password: &str,
    variant: Variant,
    config: &RecommenderConfig,
) -> Result<RecommendResponse, RecommendError> {
    let outcome = engine.recommend(password, config).map_err(|e| match e {
        Error::Policy(v) => RecommendError::Policy(PolicyViolationBody::new(v)),
        other => RecommendError::Internal(other),
    })?;
    let report = outcome.report;
    let analysis = AnalyzeResponse {
        valid: true,
        violations: Vec::new(),
        ps: report.strength_bits,
        category: report.category,
        crack_seconds: report.crack_seconds,
        feedback_text: report.feedback_text(),
        crack_human: report.crack_human,
    };
    let buttons = match variant {
        Variant::FeedbackOnly => Vec::new(),
        _ => outcome
            .recommendations
            .into_iter()
            .enumerate()
            .map(|(i, r)| Button {
                id: i as u32 + 1,
                label: r.labels.get(variant).unwrap_or_default().to_owned(),
                password: r.password,
                ps: r.strength_bits,
                crack_human: r.crack_human,
                ld: r.ld,
                mask_preview: r.mask_preview,
            })
            .collect(),
    };
    Ok(RecommendResponse { analysis, buttons, variant, seed: outcome.seed, rng: RNG_ALGORITHM.to_owned() })
}

#[derive(Debug, thiserror::Error)]
pub enum RecommendError {
    #[error("password violates policy")]
    Policy(PolicyViolationBody),
    #[error(transparent)]
    Internal(Error),
}

/// Compact JSON, the exact bytes both the service and the CLI emit.
pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("payloads serialize")
}
