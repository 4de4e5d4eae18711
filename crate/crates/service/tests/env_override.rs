//! Kept in its own binary: it mutates the process environment.

use std::path::Path;

use dpar_service::{ConfigError, ServiceConfig, MODEL_PATH_ENV};

#[test]
fn model_path_env_overrides_config() {
    let config = ServiceConfig::parse("model_path = /from/file.txt\n").unwrap();

    std::env::remove_var(MODEL_PATH_ENV);
    assert_eq!(config.clone().with_env().unwrap().model_path, Path::new("/from/file.txt"));

    std::env::set_var(MODEL_PATH_ENV, "/from/env.txt");
    assert_eq!(config.clone().with_env().unwrap().model_path, Path::new("/from/env.txt"));
    let bare = ServiceConfig::parse("listen = 127.0.0.1:9000\n").unwrap();
    assert_eq!(bare.with_env().unwrap().model_path, Path::new("/from/env.txt"));

    std::env::set_var(MODEL_PATH_ENV, "");
    let bare = ServiceConfig::parse("listen = 127.0.0.1:9000\n").unwrap();
    assert!(matches!(bare.with_env(), Err(ConfigError::MissingModel)));
    std::env::remove_var(MODEL_PATH_ENV);
}
