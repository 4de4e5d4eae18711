use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::{env, fs};

use dpar_core::model::Dimension;
use dpar_core::{RecommenderConfig, Variant};

/// Environment variable that overrides `model_path` from the config file.
pub const MODEL_PATH_ENV: &str = "DPAR_MODEL_PATH";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("config line {line}: {reason}")]
    Invalid { line: usize, reason: String },
    #[error("no model path: set model_path in the config file or {MODEL_PATH_ENV}")]
    MissingModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceConfig {
    pub model_path: PathBuf,
    pub l33t_path: Option<PathBuf>,
    pub listen: SocketAddr,
    pub recommender: RecommenderConfig,
    pub default_variant: Variant,
}

impl ServiceConfig {
    pub fn new(model_path: impl Into<PathBuf>) -> Self {
        Self {
            model_path: model_path.into(),
            l33t_path: None,
            listen: SocketAddr::from(([127, 0, 0, 1], 8080)),
            recommender: RecommenderConfig::default(),
            default_variant: Variant::default(),
        }
    }

    /// Parses a flat `key=value` file. Blank lines and `#` comments are
    /// ignored; unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut config = Self::new(PathBuf::new());
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let invalid = |reason: String| ConfigError::Invalid { line: i + 1, reason };
            let (key, value) =
                line.split_once('=').ok_or_else(|| invalid(format!("expected key=value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let bad_value = || invalid(format!("bad value {value:?} for {key}"));
            let rec = &mut config.recommender;
            match key {
                "model_path" => config.model_path = PathBuf::from(value),
                "l33t_path" => config.l33t_path = Some(PathBuf::from(value)),
                "listen" => config.listen = value.parse().map_err(|_| bad_value())?,
                "variant" => config.default_variant = value.parse().map_err(|_| bad_value())?,
                "repeat_count" => rec.repeat_count = value.parse().map_err(|_| bad_value())?,
                "crack_rate" => rec.crack_rate = value.parse().map_err(|_| bad_value())?,
                "min_strength" => rec.min_strength = Some(value.parse().map_err(|_| bad_value())?),
                "weak_max" => rec.thresholds.weak_max = value.parse().map_err(|_| bad_value())?,
                "fair_max" => rec.thresholds.fair_max = value.parse().map_err(|_| bad_value())?,
                "min_length" => rec.policy.min_length = value.parse().map_err(|_| bad_value())?,
                "require_letter" => rec.policy.require_letter = value.parse().map_err(|_| bad_value())?,
                "require_digit" => rec.policy.require_digit = value.parse().map_err(|_| bad_value())?,
                "dimension_priority" => {
                    rec.dimension_priority = value
                        .split(',')
                        .map(|d| Dimension::from_name(d.trim()))
                        .collect::<Option<Vec<_>>>()
                        .ok_or_else(bad_value)?;
                }
                _ => return Err(invalid(format!("unknown key {key:?}"))),
            }
        }
        config.recommender.validate().map_err(|e| ConfigError::Invalid { line: 0, reason: e.to_string() })?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_owned(), source })?;
        Self::parse(&text)
    }

    /// Applies `DPAR_MODEL_PATH` and checks that a model path is set.
    pub fn with_env(mut self) -> Result<Self, ConfigError> {
        if let Some(path) = env::var_os(MODEL_PATH_ENV).filter(|p| !p.is_empty()) {
            self.model_path = PathBuf::from(path);
        }
        if self.model_path.as_os_str().is_empty() {
            return Err(ConfigError::MissingModel);
        }
        Ok(self)
    }
}
