//! Data-driven password strength estimation and recommendation.
//!
//! A password is split into five dimensions (prefix, suffix, base word,
//! l33t transformations, capitalization pattern). Each dimension carries a
//! frequency table learned from a leaked-password corpus; the product of the
//! per-dimension probabilities is converted into a rank in the
//! decreasing-probability order of all dimension combinations, and
//! `log2(rank)` is the strength in bits.
//!
//! The recommender tweaks every dimension except the base word, scores the
//! resulting candidates, and keeps the strongest candidate per Levenshtein
//! distance so that users can trade memorability for strength.

pub mod api;
pub mod decompose;
pub mod engine;
pub mod error;
pub mod evaluate;
pub mod l33t;
pub mod model;
pub mod recommend;
pub mod strength;

pub use decompose::{decompose, recompose, validate_policy, PasswordParts, PasswordPolicy, PolicyResult, Violation};
pub use engine::Engine;
pub use error::{Error, Result};
pub use l33t::L33tTable;
pub use model::{load_model, save_model, train, Dimension, Model, TrainOptions};
pub use recommend::{Recommendation, RecommenderConfig, Variant};
pub use strength::{Category, RankEstimator, StrengthReport};
